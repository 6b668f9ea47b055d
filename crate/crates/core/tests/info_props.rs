use icsi::prob::{assemble_joint_theorem2, Alphabet, JointPmf, SideInfo, SourceSpec};
use icsi::search::{random_aux_scheme, Cardinalities};
use icsi::{fixtures, rng, simplex};
use proptest::prelude::*;

const TOL: f64 = 1e-9;

fn joint_strategy() -> impl Strategy<Value = JointPmf> {
    (prop::collection::vec(1usize..=3, 3), any::<u64>()).prop_map(|(shape, seed)| {
        let axes = ["A", "B", "C"].iter().zip(&shape).map(|(n, &k)| Alphabet::indexed(*n, k).unwrap()).collect();
        let mut r = rng::stream(seed, &[]);
        JointPmf::new(axes, simplex::random_point(shape.iter().product(), &mut r)).unwrap()
    })
}

/// Marginal by explicit summation over the index space.
fn brute_marginal(j: &JointPmf, keep: usize) -> Vec<f64> {
    let shape = j.shape();
    let mut out = vec![0.0; shape[keep]];
    let stride: usize = shape[keep + 1..].iter().product();
    for (i, m) in j.mass().iter().enumerate() {
        out[(i / stride) % shape[keep]] += m;
    }
    out
}

fn brute_entropy(p: &[f64]) -> f64 {
    p.iter().filter(|&&x| x > 0.0).map(|x| -x * x.log2()).sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn chain_rule_bounds_and_symmetry(j in joint_strategy()) {
        let h_ab = j.entropy(&["A", "B"]).unwrap();
        let h_a = j.entropy(&["A"]).unwrap();
        let h_b_a = j.conditional_entropy(&["B"], &["A"]).unwrap();
        prop_assert!((h_ab - h_a - h_b_a).abs() < TOL);

        let h_abc = j.entropy(&["A", "B", "C"]).unwrap();
        let cap: f64 = j.shape().iter().map(|&k| k as f64).product::<f64>().log2();
        prop_assert!(h_abc >= -TOL && h_abc <= cap + TOL);

        let i_ab = j.mutual_information(&["A"], &["B"], &[]).unwrap();
        let i_ba = j.mutual_information(&["B"], &["A"], &[]).unwrap();
        prop_assert!((i_ab - i_ba).abs() < TOL);
        prop_assert!(i_ab >= 0.0 && i_ab <= h_a.min(j.entropy(&["B"]).unwrap()) + TOL);
        prop_assert!(j.mutual_information(&["A"], &["B"], &["C"]).unwrap() >= 0.0);

        // I(A;B,C) = I(A;C) + I(A;B|C)
        let lhs = j.mutual_information(&["A"], &["B", "C"], &[]).unwrap();
        let rhs = j.mutual_information(&["A"], &["C"], &[]).unwrap() + j.mutual_information(&["A"], &["B"], &["C"]).unwrap();
        prop_assert!((lhs - rhs).abs() < TOL);
    }

    #[test]
    fn marginals_match_direct_sums(j in joint_strategy()) {
        for (k, name) in ["A", "B", "C"].iter().enumerate() {
            let m = j.marginal(&[name]).unwrap();
            let b = brute_marginal(&j, k);
            prop_assert!(m.mass().iter().zip(&b).all(|(x, y)| (x - y).abs() < 1e-12));
            prop_assert!((j.entropy(&[name]).unwrap() - brute_entropy(&b)).abs() < TOL);
        }
        // Reordered marginal is a transpose.
        let ab = j.marginal(&["A", "B"]).unwrap();
        let ba = j.marginal(&["B", "A"]).unwrap();
        let (na, nb) = (j.shape()[0], j.shape()[1]);
        for a in 0..na {
            for b in 0..nb {
                prop_assert!((ab.get(&[a, b]).unwrap() - ba.get(&[b, a]).unwrap()).abs() < 1e-15);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    /// Assembled joints reproduce their inputs and respect the Markov chains
    /// built into the factorization.
    #[test]
    fn assembled_joint_structure(seed in any::<u64>()) {
        let mut r = rng::stream(seed, &[]);
        let src = |r: &mut _| {
            let j = JointPmf::new(vec![Alphabet::binary("U"), Alphabet::binary("V")], simplex::random_point(4, r)).unwrap();
            SourceSpec::new(j, SideInfo::Interfering, None).unwrap()
        };
        let (a, b) = (src(&mut r), src(&mut r));
        let ch = fixtures::xor_z_channel();
        let aux = random_aux_scheme(&a, &b, &ch, &Cardinalities::default(), &mut r).unwrap();
        let j = assemble_joint_theorem2(&a, &b, &ch, &aux).unwrap();

        let uv = j.marginal(&["U1", "V1"]).unwrap();
        prop_assert!(uv.mass().iter().zip(a.joint().mass()).all(|(x, y)| (x - y).abs() < 1e-12));
        prop_assert!(j.mutual_information(&["U1", "V1"], &["U2", "V2"], &[]).unwrap() < TOL);
        // V1 - U1 - (W1, X1) given Q and the channel sees only the inputs.
        prop_assert!(j.mutual_information(&["V1"], &["W1", "X1"], &["U1", "Q"]).unwrap() < TOL);
        prop_assert!(j.mutual_information(&["U1", "U2", "W1", "W2", "Q"], &["Y1", "Y2"], &["X1", "X2"]).unwrap() < TOL);
        // Data processing along U1 -> X1 -> Y1 given Q.
        let i_uy = j.mutual_information(&["U1"], &["Y1"], &["Q"]).unwrap();
        prop_assert!(i_uy <= j.mutual_information(&["U1"], &["X1"], &["Q"]).unwrap() + TOL);
        prop_assert!(i_uy <= j.mutual_information(&["X1"], &["Y1"], &["Q"]).unwrap() + TOL);
    }
}
