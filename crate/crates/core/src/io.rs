//! File formats.
//!
//! Bit vectors (truth tables, DISJ inputs) are written as lowercase hex of
//! their little-endian byte sequence: bit `i` of the vector is bit `i % 8` of
//! byte `i / 8`, and byte 0 comes first. A truth table always occupies at
//! least one byte; unused high bits must be zero.

use serde::{Deserialize, Serialize};

use crate::boolfn::{BooleanFunction, FourierSpectrum};
use crate::constructions::{CharacterFamily, FarnessCertificate};
use crate::error::{Error, Result};
use crate::exact::ExactFraction;
use crate::reduction::BlockDisjInstance;

fn bits_to_hex(len: usize, bit: impl Fn(usize) -> bool, min_bytes: usize) -> String {
    let mut bytes = vec![0u8; len.div_ceil(8).max(min_bytes)];
    for i in (0..len).filter(|&i| bit(i)) {
        bytes[i / 8] |= 1 << (i % 8);
    }
    hex::encode(bytes)
}

fn hex_to_bits(field: &str, s: &str, len: usize, min_bytes: usize) -> Result<Vec<bool>> {
    let bytes = hex::decode(s.trim()).map_err(|e| Error::parse(field, e))?;
    let want = len.div_ceil(8).max(min_bytes);
    if bytes.len() != want {
        return Err(Error::parse(
            field,
            format!("expected {want} bytes ({} hex digits), got {}", 2 * want, bytes.len()),
        ));
    }
    let bits: Vec<bool> = (0..bytes.len() * 8)
        .map(|i| bytes[i / 8] >> (i % 8) & 1 == 1)
        .collect();
    if bits[len..].iter().any(|b| *b) {
        return Err(Error::parse(field, format!("bits set beyond length {len}")));
    }
    Ok(bits[..len].to_vec())
}

pub fn table_to_hex(f: &BooleanFunction) -> String {
    bits_to_hex(1 << f.arity(), |x| f.bit(x as u64), 1)
}

pub fn table_from_hex(n: usize, s: &str) -> Result<BooleanFunction> {
    if n == 0 || n > crate::boolfn::MAX_ARITY {
        return Err(Error::InvalidArity(n));
    }
    let bits = hex_to_bits("table_hex", s, 1 << n, 1)?;
    BooleanFunction::from_bits(n, |x| bits[x as usize])
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FunctionRecord {
    n: usize,
    table_hex: String,
}

/// `{"n": …, "table_hex": …}`.
pub fn function_to_json(f: &BooleanFunction) -> String {
    serde_json::to_string(&FunctionRecord {
        n: f.arity(),
        table_hex: table_to_hex(f),
    })
    .expect("plain record serialises")
}

pub fn function_from_json(s: &str) -> Result<BooleanFunction> {
    let rec: FunctionRecord = serde_json::from_str(s).map_err(|e| json_error("function", e))?;
    table_from_hex(rec.n, &rec.table_hex)
}

fn json_error(what: &str, e: serde_json::Error) -> Error {
    Error::parse(
        what,
        format!("line {} column {}: {e}", e.line(), e.column()),
    )
}

/// CSV with header `subset_mask,c_S,coefficient`, one row per subset.
pub fn spectrum_to_csv(spec: &FourierSpectrum) -> String {
    let mut out = String::from("subset_mask,c_S,coefficient\n");
    for (s, &c) in spec.coeffs().iter().enumerate() {
        out.push_str(&format!("{s},{c},{}\n", spec.coefficient(s as u64)));
    }
    out
}

pub fn spectrum_from_csv(n: usize, s: &str) -> Result<FourierSpectrum> {
    let mut lines = s.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == "subset_mask,c_S,coefficient" => {}
        _ => return Err(Error::parse("spectrum csv", "missing header on line 1")),
    }
    let mut coeffs = vec![0i64; 1 << n];
    let mut seen = vec![false; 1 << n];
    for (i, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let field = |name: &str| format!("spectrum csv line {} ({name})", i + 1);
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 3 {
            return Err(Error::parse(field("row"), "expected 3 columns"));
        }
        let s: usize = cols[0].trim().parse().map_err(|e| Error::parse(field("subset_mask"), e))?;
        let c: i64 = cols[1].trim().parse().map_err(|e| Error::parse(field("c_S"), e))?;
        let q: ExactFraction = cols[2].parse().map_err(|_| Error::parse(field("coefficient"), cols[2]))?;
        if s >= 1 << n || seen[s] {
            return Err(Error::parse(field("subset_mask"), "out of range or repeated"));
        }
        if q != ExactFraction::new(c as i128, n as u32) {
            return Err(Error::parse(field("coefficient"), "does not equal c_S / 2^n"));
        }
        seen[s] = true;
        coeffs[s] = c;
    }
    if seen.iter().any(|v| !v) {
        return Err(Error::parse("spectrum csv", "missing rows"));
    }
    FourierSpectrum::from_coeffs(n, coeffs)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FamilyRecord {
    n: usize,
    l: usize,
    sets: Vec<u64>,
}

/// `{"n": …, "l": …, "sets": [mask for prefix 0, …]}`; masks use absolute
/// coordinates (bit `i-1` for coordinate `i`) and must avoid `[l]`.
pub fn family_to_json(fam: &CharacterFamily) -> String {
    serde_json::to_string(&FamilyRecord {
        n: fam.arity(),
        l: fam.prefix_dim(),
        sets: fam.sets().to_vec(),
    })
    .expect("plain record serialises")
}

pub fn family_from_json(s: &str) -> Result<CharacterFamily> {
    let rec: FamilyRecord = serde_json::from_str(s).map_err(|e| json_error("family", e))?;
    CharacterFamily::new(rec.n, rec.l, rec.sets)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceRecord {
    l_blocks: usize,
    m: usize,
    k: usize,
    x_hex: String,
    y_hex: String,
}

/// `{"l_blocks", "m", "k", "x_hex", "y_hex"}` with `+1` as bit 1.
pub fn instance_to_json(inst: &BlockDisjInstance) -> String {
    let len = inst.l_blocks() * inst.m();
    serde_json::to_string(&InstanceRecord {
        l_blocks: inst.l_blocks(),
        m: inst.m(),
        k: inst.k(),
        x_hex: bits_to_hex(len, |i| inst.x()[i], 0),
        y_hex: bits_to_hex(len, |i| inst.y()[i], 0),
    })
    .expect("plain record serialises")
}

pub fn instance_from_json(s: &str) -> Result<BlockDisjInstance> {
    let rec: InstanceRecord = serde_json::from_str(s).map_err(|e| json_error("instance", e))?;
    let len = rec
        .l_blocks
        .checked_mul(rec.m)
        .filter(|l| *l <= 1 << 24)
        .ok_or_else(|| Error::parse("instance", "l_blocks·m too large"))?;
    let x = hex_to_bits("x_hex", &rec.x_hex, len, 0)?;
    let y = hex_to_bits("y_hex", &rec.y_hex, len, 0)?;
    BlockDisjInstance::new(rec.l_blocks, rec.m, rec.k, x, y)
}

pub const CERTIFICATE_CSV_HEADER: &str =
    "mode,l,m,tail_exact,distance_lb_exact,paper_claimed,oracle_min";

/// One certificate row; `oracle_min` is left blank when absent.
pub fn certificate_csv_row(cert: &FarnessCertificate, oracle_min: Option<ExactFraction>) -> String {
    format!(
        "{},{},{},{},{},{},{}",
        cert.mode,
        cert.l,
        cert.m,
        cert.observed_tail,
        cert.claimed_distance_lb,
        cert.paper_claimed,
        oracle_min.map(|f| f.to_string()).unwrap_or_default()
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolfn::{character, character_bit};

    #[test]
    fn table_hex_layout() {
        let chi = character(2, 0b11).unwrap();
        assert_eq!(table_to_hex(&chi), "06");
        let block = BooleanFunction::from_bits(3, |x| x & 1 == 1 && character_bit(0b110, x)).unwrap();
        assert_eq!(table_to_hex(&block), "28");
        let big = character(4, 0b1000).unwrap();
        assert_eq!(table_to_hex(&big), "00ff");
        assert_eq!(table_from_hex(4, "00ff").unwrap(), big);
        assert!(table_from_hex(2, "16").is_err());
        assert!(table_from_hex(3, "0028").is_err());
    }

    #[test]
    fn function_json() {
        let f = character(3, 0b111).unwrap();
        let s = function_to_json(&f);
        assert_eq!(s, r#"{"n":3,"table_hex":"96"}"#);
        assert_eq!(function_from_json(&s).unwrap(), f);
        assert!(function_from_json(r#"{"n":3}"#).is_err());
        assert!(function_from_json(r#"{"n":3,"table_hex":"zz"}"#).is_err());
    }

    #[test]
    fn spectrum_csv() {
        let spec = character(2, 0b01).unwrap().walsh_hadamard();
        let csv = spectrum_to_csv(&spec);
        assert_eq!(
            csv,
            "subset_mask,c_S,coefficient\n0,0,0/2^0\n1,4,1/2^0\n2,0,0/2^0\n3,0,0/2^0\n"
        );
        assert_eq!(spectrum_from_csv(2, &csv).unwrap(), spec);
        assert!(spectrum_from_csv(2, &csv.replace("1,4,1/2^0", "1,4,1/2^1")).is_err());
    }

    #[test]
    fn family_and_instance_json() {
        let fam = CharacterFamily::new(3, 1, vec![0b110, 0]).unwrap();
        let s = family_to_json(&fam);
        assert_eq!(s, r#"{"n":3,"l":1,"sets":[6,0]}"#);
        assert_eq!(family_from_json(&s).unwrap(), fam);
        assert!(family_from_json(r#"{"n":3,"l":1,"sets":[1,0]}"#).is_err());

        let v = |s: &str| s.chars().map(|c| c == '+').collect::<Vec<_>>();
        let inst = BlockDisjInstance::new(2, 2, 1, v("+--+"), v("-++-")).unwrap();
        let s = instance_to_json(&inst);
        assert_eq!(s, r#"{"l_blocks":2,"m":2,"k":1,"x_hex":"09","y_hex":"06"}"#);
        assert_eq!(instance_from_json(&s).unwrap(), inst);
        assert!(instance_from_json(r#"{"l_blocks":2,"m":2,"k":1,"x_hex":"0f","y_hex":"06"}"#).is_err());
    }
}
