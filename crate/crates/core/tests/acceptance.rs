use lowdeg::verify::{criterion_rows, GridConfig, Status};

fn criterion(c: u8, name: &str) {
    let rows = criterion_rows(c, &GridConfig::default());
    let bad: Vec<_> = rows.iter().filter(|r| r.status == Status::Fail).collect();
    let checked = rows.iter().filter(|r| r.status == Status::Pass).count();
    let ok = bad.is_empty() && checked > 0;
    println!("criterion {c}: {} ({name}; {checked} rows passed)", if ok { "PASS" } else { "FAIL" });
    for r in &bad {
        println!("    {} [{}] expected {} observed {}", r.check_id, r.parameters, r.expected, r.observed);
    }
    assert!(ok, "criterion {c} failed: {} failing rows, {checked} passing", bad.len());
}

#[test]
fn criterion_1_transform_exactness() {
    criterion(1, "transform roundtrip and Parseval");
}

#[test]
fn criterion_2_block_degree_bound() {
    criterion(2, "block functions have degree at most m + l");
}

#[test]
fn criterion_3_heavy_coefficients_and_summed_tail() {
    criterion(3, "heavy coefficients and tail above m - 1");
}

#[test]
fn criterion_4_single_heavy_tail() {
    criterion(4, "tail above m + l - 1");
}

#[test]
fn criterion_5_disj_embedding() {
    criterion(5, "DISJ embedding classifies every promise instance");
}

#[test]
fn criterion_6_block_padding() {
    criterion(6, "block padding preserves DISJ");
}

#[test]
fn criterion_7_protocol_compiler() {
    criterion(7, "query-to-protocol compilation");
}

#[test]
fn criterion_8_minimax_experiment() {
    criterion(8, "minimax floor, coupling and constant-decision error");
}

#[test]
fn criterion_9_derivative_one_sided() {
    criterion(9, "derivative tester is one-sided");
}
