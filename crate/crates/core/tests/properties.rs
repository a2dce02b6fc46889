use lowdeg::boolfn::{character, hamming_distance, BooleanFunction};
use lowdeg::constructions::{build_block_function, rng_from_seed, CharacterFamily};
use lowdeg::exact::ExactFraction;
use lowdeg::reduction::{block_instance_from_families, families_from_block_instance, random_block_instance};
use proptest::prelude::*;

fn function(max_n: usize) -> impl Strategy<Value = BooleanFunction> {
    (1..=max_n, any::<u64>()).prop_map(|(n, seed)| {
        BooleanFunction::random(n, &mut rng_from_seed(seed)).unwrap()
    })
}

proptest! {
    #[test]
    fn inverse_undoes_transform(f in function(10)) {
        prop_assert_eq!(f.walsh_hadamard().inverse().unwrap(), f);
    }

    #[test]
    fn characters_are_multiplicative(n in 1usize..10, s in any::<u64>(), t in any::<u64>()) {
        let full = (1u64 << n) - 1;
        let (s, t) = (s & full, t & full);
        let prod = character(n, s).unwrap().multiply(&character(n, t).unwrap()).unwrap();
        prop_assert_eq!(prod, character(n, s ^ t).unwrap());
    }

    // Pr[f ≠ g] = (1 - <f, g>) / 2 with <f, g> = Σ f̂(S) ĝ(S).
    #[test]
    fn distance_matches_inner_product(n in 1usize..9, a in any::<u64>(), b in any::<u64>()) {
        let f = BooleanFunction::random(n, &mut rng_from_seed(a)).unwrap();
        let g = BooleanFunction::random(n, &mut rng_from_seed(b)).unwrap();
        let (sf, sg) = (f.walsh_hadamard(), g.walsh_hadamard());
        let inner: i128 = sf.coeffs().iter().zip(sg.coeffs()).map(|(x, y)| *x as i128 * *y as i128).sum();
        let dist = hamming_distance(&f, &g).unwrap();
        let expected = (ExactFraction::ONE - ExactFraction::new(inner, 2 * n as u32)).div_pow2(1);
        prop_assert_eq!(dist, expected);
    }

    #[test]
    fn block_degree_bound(n in 2usize..9, l in 0usize..3, seed in any::<u64>(), masks in prop::collection::vec(any::<u64>(), 4)) {
        let l = l.min(n - 1);
        let suffix = ((1u64 << n) - 1) & !((1u64 << l) - 1);
        let sets: Vec<u64> = (0..1usize << l).map(|a| masks[a] & suffix).collect();
        let fam = CharacterFamily::new(n, l, sets).unwrap();
        let f = build_block_function(&fam).unwrap();
        prop_assert!(f.fourier_degree() <= fam.max_set_size() + l, "seed {}", seed);
    }

    #[test]
    fn embedding_roundtrip(l in 0usize..3, w in 1usize..3, seed in any::<u64>(), hit in any::<bool>()) {
        let mut rng = rng_from_seed(seed);
        let (m, k) = (2 * w, 2 * w + 2 * l.max(1));
        let n = k + m;
        let which = hit.then_some((seed % (1 << l)) as usize);
        let inst = random_block_instance(&mut rng, 1 << l, m, w, which).unwrap();
        let ci = families_from_block_instance(&inst, n, k, l).unwrap();
        prop_assert_eq!(block_instance_from_families(&ci).unwrap(), inst);
    }
}
