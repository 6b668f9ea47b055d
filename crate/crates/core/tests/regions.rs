use icsi::fixtures::{self, SideMap};
use icsi::polytope::InequalitySystem;
use icsi::prob::{assemble_joint_corollary1, assemble_joint_theorem2, Alphabet, ChannelSpec, CondPmf, JointPmf, SideInfo, SourceSpec};
use icsi::regions::*;
use icsi::search::{random_aux_scheme, random_aux_scheme_sep, Cardinalities};
use icsi::{rng, simplex, Error};
use rand::Rng;

const EPS: f64 = 1e-9;

fn bits(h: f64, side: SideMap) -> SourceSpec {
    fixtures::bit_source(h, side, SideInfo::Interfering).unwrap()
}

fn random_source<R: Rng>(nu: usize, nv: usize, r: &mut R) -> SourceSpec {
    let joint = JointPmf::new(
        vec![Alphabet::indexed("U", nu).unwrap(), Alphabet::indexed("V", nv).unwrap()],
        simplex::random_point(nu * nv, r),
    )
    .unwrap();
    SourceSpec::new(joint, SideInfo::Interfering, None).unwrap()
}

fn random_channel<R: Rng>(nx: usize, ny: usize, r: &mut R) -> ChannelSpec {
    let rows: Vec<Vec<f64>> = (0..nx * nx).map(|_| simplex::random_point(ny * ny, r)).collect();
    let k = CondPmf::from_rows(
        vec![Alphabet::indexed("Y1", ny).unwrap(), Alphabet::indexed("Y2", ny).unwrap()],
        vec![Alphabet::indexed("X1", nx).unwrap(), Alphabet::indexed("X2", nx).unwrap()],
        &rows,
    )
    .unwrap();
    ChannelSpec::general(k).unwrap()
}

fn unary_everything() -> (SourceSpec, SourceSpec, ChannelSpec, AuxScheme) {
    let src = || fixtures::null_source(SideInfo::Interfering);
    let u = |s: &str| Alphabet::unary(s);
    let k = CondPmf::new(vec![u("Y1"), u("Y2")], vec![u("X1"), u("X2")], vec![1.0]).unwrap();
    let ch = ChannelSpec::general(k).unwrap();
    let kk = |w: &str, x: &str, uu: &str| CondPmf::new(vec![u(w), u(x)], vec![u(uu), u("Q")], vec![1.0]).unwrap();
    let aux = AuxScheme::new(u("Q"), vec![1.0], kk("W1", "X1", "U1"), kk("W2", "X2", "U2")).unwrap();
    (src(), src(), ch, aux)
}

/// XOR fixture scheme with `W1 = X1` uniform, `W2` unary, `X2` uniform, `Q` unary.
fn xor_w1_copy_scheme() -> AuxScheme {
    let q = Alphabet::unary("Q");
    let b = |s: &str| Alphabet::binary(s);
    let w1x1 = CondPmf::new(vec![b("W1"), b("X1")], vec![b("U1"), q.clone()], vec![0.5, 0.0, 0.0, 0.5, 0.5, 0.0, 0.0, 0.5]).unwrap();
    let w2x2 = CondPmf::new(vec![Alphabet::unary("W2"), b("X2")], vec![b("U2"), q.clone()], vec![0.5, 0.5, 0.5, 0.5]).unwrap();
    AuxScheme::new(q, vec![1.0], w1x1, w2x2).unwrap()
}

#[test]
fn theorem2_unary_inputs_give_zero_margins() {
    let (s1, s2, ch, aux) = unary_everything();
    let r = theorem2_margins(&s1, &s2, &ch, &aux, EPS).unwrap();
    assert_eq!(r.margins.len(), 11);
    assert!(r.values().iter().all(|m| *m == 0.0));
    assert!(!r.feasible);
}

#[test]
fn theorem2_rejects_desired_wiring() {
    let (s1, s2, ch, aux) = unary_everything();
    let d = s1.with_wiring(SideInfo::Desired);
    assert!(matches!(theorem2_margins(&d, &s2, &ch, &aux, EPS), Err(Error::Configuration(_))));
}

#[test]
fn theorem2_xor_sum_margin_matches_direct_evaluation() {
    let ch = fixtures::xor_z_channel();
    let (s1, s2) = (fixtures::bit_source(1.0, SideMap::Empty, SideInfo::Interfering).unwrap(), bits(1.0, SideMap::Empty));
    let aux = xor_w1_copy_scheme();
    let r = theorem2_margins(&s1, &s2, &ch, &aux, EPS).unwrap();
    let j = assemble_joint_theorem2(&s1, &s2, &ch, &aux).unwrap();
    let direct = j.mutual_information(&["W1", "X2"], &["V1", "Y2"], &["W2"]).unwrap()
        + j.mutual_information(&["W2", "X1"], &["V2", "Y1"], &["W1"]).unwrap()
        - j.entropy(&["U1"]).unwrap()
        - j.entropy(&["U2"]).unwrap();
    assert!((r.values()[6] - direct).abs() < 1e-12);
    // W2 unary and X2 uniform: I(W1,X2;Y2) = 1 and I(X1;Y1|W1) = 0.
    assert!((direct - (1.0 + 0.0 - 2.0)).abs() < 1e-9);
}

#[test]
fn unary_side_information_labels_do_not_matter() {
    let ch = fixtures::xor_z_channel();
    let a = bits(0.7, SideMap::Empty);
    let relabeled = SourceSpec::new(
        JointPmf::new(vec![Alphabet::binary("A"), Alphabet::new("B", vec!["nothing".into()]).unwrap()], a.joint().mass().to_vec()).unwrap(),
        SideInfo::Interfering,
        None,
    )
    .unwrap();
    let aux = xor_w1_copy_scheme();
    let r1 = theorem2_margins(&a, &a, &ch, &aux, EPS).unwrap();
    let r2 = theorem2_margins(&relabeled, &relabeled, &ch, &aux, EPS).unwrap();
    assert_eq!(r1.values(), r2.values());
}

#[test]
fn appendix_b_unary_and_verbatim_rows() {
    let (s1, s2, ch, aux) = unary_everything();
    let sys = appendix_b_system(&s1, &s2, &ch, &aux).unwrap();
    assert!(sys.rows().iter().all(|r| r.bound == 0.0));
    let mut p = sys.fm_eliminate_all(&["logL1", "logL2"]).unwrap();
    p.add_nonnegativity();
    let mut expected = InequalitySystem::new(&["HU1", "HU2"]);
    expected.add_le(&[("HU1", 1.0)], 0.0, "").unwrap();
    expected.add_le(&[("HU2", 1.0)], 0.0, "").unwrap();
    expected.add_nonnegativity();
    assert!(p.region_equal(&expected, 1e-9).unwrap());

    let mut r = rng::stream(11, &[]);
    let ch = fixtures::xor_z_channel();
    let (a, b) = (random_source(2, 2, &mut r), random_source(2, 2, &mut r));
    let aux = random_aux_scheme(&a, &b, &ch, &Cardinalities::default(), &mut r).unwrap();
    let t = theorem2_terms(&a, &b, &ch, &aux).unwrap();
    let sys = t.appendix_b_system();
    let j = assemble_joint_theorem2(&a, &b, &ch, &aux).unwrap();
    let e1 = j.mutual_information(&["U1"], &["W1"], &["Q"]).unwrap();
    let e2 = j.mutual_information(&["U2"], &["W2"], &["Q"]).unwrap();
    let row = |c: [f64; 4], b: f64| sys.rows().iter().any(|r| r.coeffs == c && r.bound == b);
    assert!(row([0.0, 0.0, -1.0, 0.0], -e1));
    assert!(row([0.0, 0.0, 0.0, -1.0], -e2));
}

/// Membership in the projection, checked without elimination: a point is in
/// it iff the 2-D slice in `(logL1, logL2)` is nonempty. The slice is tested
/// by enumerating its vertices inside a large box.
fn in_projection_by_slice(t: &Theorem2Terms, h1: f64, h2: f64) -> bool {
    let pre = t.appendix_b_system();
    let slice = pre.substitute("HU1", h1).unwrap().substitute("HU2", h2).unwrap().with_box(-100.0, 100.0);
    !slice.enumerate_vertices().unwrap().is_empty()
}

#[test]
fn fm_projection_equals_theorem2_at_random_instances() {
    let mut r = rng::stream(2024, &[]);
    for inst in 0..20 {
        let (nu, nx) = (2 + inst % 2, 2 + (inst / 2) % 2);
        let (a, b) = (random_source(nu, 2, &mut r), random_source(2, nu, &mut r));
        let ch = random_channel(nx, 2, &mut r);
        let cards = Cardinalities { q: Some(2), w1: Some(2), w2: Some(3), ..Default::default() };
        let aux = random_aux_scheme(&a, &b, &ch, &cards, &mut r).unwrap();
        let t = theorem2_terms(&a, &b, &ch, &aux).unwrap();
        let check = t.verify_fm(1e-9).unwrap();
        assert!(check.equal, "instance {inst}");
        // Dense sampling against the pre-elimination system itself.
        let edge = t.a1.max(t.a2) + 0.2;
        let direct = t.system();
        for _ in 0..500 {
            let (h1, h2) = (r.random_range(0.0..edge), r.random_range(0.0..edge));
            let m = direct.contains(&[h1, h2], 0.0).unwrap().min_margin;
            if m.abs() < 1e-7 {
                continue;
            }
            assert_eq!(m > 0.0, in_projection_by_slice(&t, h1, h2), "instance {inst} point ({h1}, {h2})");
        }
    }
}

#[test]
fn corrupted_constant_is_detected() {
    let mut r = rng::stream(5, &[]);
    let ch = fixtures::xor_z_channel();
    let (a, b) = (bits(0.5, SideMap::Copy), bits(0.3, SideMap::Empty));
    let aux = random_aux_scheme(&a, &b, &ch, &Cardinalities::default(), &mut r).unwrap();
    let mut t = theorem2_terms(&a, &b, &ch, &aux).unwrap();
    assert!(t.verify_fm(1e-9).unwrap().equal);
    let pre = t.appendix_b_system();
    t.a1 = t.a1 * 0.5;
    let check = verify_fm_projection(&pre, &t.system(), 10.0, 1e-9).unwrap();
    assert!(!check.equal);
}

#[test]
fn corollary1_matches_theorem2_under_substitution() {
    let mut r = rng::stream(77, &[]);
    for inst in 0..15 {
        let (a, b) = (random_source(2, 2, &mut r), random_source(2, 3, &mut r));
        let ch = random_channel(2, 2, &mut r);
        let cards = Cardinalities { q: Some(1 + inst % 3), wb1: Some(2), wb2: Some(3), wt1: Some(2), wt2: Some(2), ..Default::default() };
        let sep = random_aux_scheme_sep(&a, &b, &ch, &cards, &mut r).unwrap();
        let c1 = corollary1_margins(&a, &b, &ch, &sep, EPS).unwrap().values();
        let t2 = theorem2_margins(&a, &b, &ch, &sep.to_joint_scheme().unwrap(), EPS).unwrap().values();
        for (i, &j) in COROLLARY1_TO_THEOREM2.iter().enumerate() {
            assert!((c1[i] - t2[j]).abs() < 1e-9, "instance {inst} condition {i}: {} vs {}", c1[i], t2[j]);
        }
    }
}

#[test]
fn corollary1_examples() {
    let (s1, s2, ch, _) = unary_everything();
    let u = |s: &str| Alphabet::unary(s);
    let sep = AuxSchemeSep::new(
        u("Q"),
        vec![1.0],
        CondPmf::new(vec![u("WB1")], vec![u("U1"), u("Q")], vec![1.0]).unwrap(),
        CondPmf::new(vec![u("WB2")], vec![u("U2"), u("Q")], vec![1.0]).unwrap(),
        CondPmf::new(vec![u("WT1"), u("X1")], vec![u("Q")], vec![1.0]).unwrap(),
        CondPmf::new(vec![u("WT2"), u("X2")], vec![u("Q")], vec![1.0]).unwrap(),
    )
    .unwrap();
    assert!(corollary1_margins(&s1, &s2, &ch, &sep, EPS).unwrap().values().iter().all(|m| *m == 0.0));

    // Unary WB: only channel terms and source entropies remain.
    let mut r = rng::stream(3, &[]);
    let (a, b) = (random_source(2, 2, &mut r), random_source(2, 2, &mut r));
    let ch = random_channel(2, 2, &mut r);
    let cards = Cardinalities { q: Some(2), wb1: Some(1), wb2: Some(1), ..Default::default() };
    let sep = random_aux_scheme_sep(&a, &b, &ch, &cards, &mut r).unwrap();
    let t = corollary1_terms(&a, &b, &ch, &sep).unwrap();
    assert!([t.b1_v1, t.b2_v2, t.b1_u1_g_v1, t.b2_u2_g_v2].iter().all(|x| x.abs() < 1e-12));
    let m = t.margins(EPS).values();
    let j = assemble_joint_corollary1(&a, &b, &ch, &sep).unwrap();
    let r1 = j.mutual_information(&["X1"], &["Y1"], &["WT1", "WT2", "Q"]).unwrap();
    let r2 = j.mutual_information(&["WT1", "X2"], &["Y2"], &["Q"]).unwrap();
    assert!((m[4] - (r1 + r2 - a.h_u() - b.h_u())).abs() < 1e-12);
}

#[test]
fn separated_joint_properties() {
    let mut r = rng::stream(8, &[]);
    let (a, b) = (random_source(3, 2, &mut r), random_source(2, 2, &mut r));
    let ch = random_channel(2, 2, &mut r);
    let sep = random_aux_scheme_sep(&a, &b, &ch, &Cardinalities::default(), &mut r).unwrap();
    let j = assemble_joint_corollary1(&a, &b, &ch, &sep).unwrap();
    assert!(j.mutual_information(&["WT1"], &["U1"], &["Q"]).unwrap().abs() < 1e-9);
    assert!(j.mutual_information(&["X1"], &["U1"], &["Q"]).unwrap().abs() < 1e-9);
    // WB1 = V1 copy.
    let src = bits(0.6, SideMap::Copy);
    let sep = fixtures::xor_separated_scheme(&src).unwrap();
    let j = assemble_joint_corollary1(&src, &bits(0.5, SideMap::Empty), &fixtures::xor_z_channel(), &sep).unwrap();
    let i = j.mutual_information(&["WB1"], &["V1"], &["Q"]).unwrap();
    assert!((i - j.entropy(&["V1"]).unwrap()).abs() < 1e-9);
}

#[test]
fn theorem1_examples() {
    let mut unit_square = InequalitySystem::new(&["R1", "R2"]);
    unit_square.add_le(&[("R1", 1.0)], 1.0, "R1 <= C1").unwrap();
    unit_square.add_le(&[("R2", 1.0)], 1.0, "R2 <= C2").unwrap();
    unit_square.add_nonnegativity();
    let full = fixtures::bit_source(1.0, SideMap::Copy, SideInfo::Desired).unwrap();
    let v = theorem1_check(&full, &full, &unit_square, EPS).unwrap();
    assert_eq!(v.point, vec![0.0, 0.0]);
    assert!(v.feasible && (v.margin - 1.0).abs() < 1e-12);

    let blind = fixtures::bit_source(0.7, SideMap::Empty, SideInfo::Desired).unwrap();
    let v = theorem1_check(&blind, &blind, &unit_square, EPS).unwrap();
    assert!((v.point[0] - 0.7).abs() < 1e-12);

    let d = fixtures::dsbs(0.1, SideInfo::Desired).unwrap();
    let v = theorem1_check(&d, &d, &unit_square, EPS).unwrap();
    let h = -(0.1f64 * 0.1f64.log2()) - 0.9 * 0.9f64.log2();
    assert!(v.feasible && (v.margin - (1.0 - h)).abs() < 1e-12);
    assert!((v.margin - 0.531).abs() < 1e-3);

    assert!(theorem1_check(&d.with_wiring(SideInfo::Interfering), &d, &unit_square, EPS).is_err());
}

#[test]
fn theorem1_margin_monotone_in_side_information() {
    let mut r = rng::stream(9, &[]);
    let mut region = InequalitySystem::new(&["R1", "R2"]);
    region.add_le(&[("R1", 1.0), ("R2", 1.0)], 1.5, "").unwrap();
    region.add_le(&[("R1", 1.0)], 1.0, "").unwrap();
    region.add_nonnegativity();
    for _ in 0..50 {
        let a = random_source(2, 2, &mut r).with_wiring(SideInfo::Desired);
        let p_u = a.joint().marginal(&["U"]).unwrap();
        let full = SourceSpec::deterministic(Alphabet::binary("U"), Alphabet::binary("V"), p_u.mass(), vec![0, 1], SideInfo::Desired).unwrap();
        let m_partial = theorem1_check(&a, &a, &region, EPS).unwrap().margin;
        let m_full = theorem1_check(&full, &full, &region, EPS).unwrap().margin;
        assert!(m_full >= m_partial - 1e-12);
    }
}

#[test]
fn condition1_examples() {
    assert!(check_condition1(&fixtures::xor_z_channel(), 50, 2, 1).unwrap().holds);
    let and = check_condition1(&fixtures::and_z_channel(), 50, 2, 1).unwrap();
    assert!(!and.holds && and.max_deviation > 0.01);
    let f1 = CondPmf::new(vec![Alphabet::binary("Y1")], vec![Alphabet::binary("X1")], vec![0.8, 0.2, 0.3, 0.7]).unwrap();
    let f2 = CondPmf::new(
        vec![Alphabet::indexed("Y2", 3).unwrap()],
        vec![Alphabet::binary("X1"), Alphabet::unary("X2")],
        vec![0.2, 0.3, 0.5, 0.6, 0.1, 0.3],
    )
    .unwrap();
    assert!(check_condition1(&ChannelSpec::z(f1, f2).unwrap(), 20, 2, 1).unwrap().holds);
    assert!(matches!(
        check_condition1(&fixtures::orthogonal_noiseless_channel(), 5, 2, 1),
        Err(Error::Configuration(_))
    ));
}

#[test]
fn tau_examples() {
    let t = compute_tau(&fixtures::xor_z_channel(), 0.01).unwrap();
    assert!((t.tau - 1.0).abs() < 1e-9);
    assert!(t.p_star.iter().all(|p| (p - 0.5).abs() < 1e-3));
    assert!(t.condition2_holds);

    let f1 = CondPmf::new(vec![Alphabet::binary("Y1")], vec![Alphabet::binary("X1")], vec![1.0, 0.0, 0.0, 1.0]).unwrap();
    let f2 = CondPmf::new(vec![Alphabet::unary("Y2")], vec![Alphabet::binary("X1"), Alphabet::binary("X2")], vec![1.0; 4]).unwrap();
    assert_eq!(compute_tau(&ChannelSpec::z(f1, f2).unwrap(), 0.01).unwrap().tau, 0.0);

    // Y2 = X2 with a ternary X2.
    let f1 = CondPmf::new(vec![Alphabet::binary("Y1")], vec![Alphabet::binary("X1")], vec![1.0, 0.0, 0.0, 1.0]).unwrap();
    let x2 = Alphabet::indexed("X2", 3).unwrap();
    let f2 = CondPmf::deterministic(vec![Alphabet::indexed("Y2", 3).unwrap()], vec![Alphabet::binary("X1"), x2], |i| i % 3).unwrap();
    let t = compute_tau(&ChannelSpec::z(f1, f2).unwrap(), 0.01).unwrap();
    assert!((t.tau - 3f64.log2()).abs() < 1e-9);
    assert!(t.p_star.iter().all(|p| (p - 1.0 / 3.0).abs() < 1e-3));
    assert!(t.condition2_holds);

    let and = compute_tau(&fixtures::and_z_channel(), 0.01).unwrap();
    assert!(!and.condition2_holds && and.deviation > 0.1);
    assert!(and.tau <= 1.0 + 1e-9);
}

fn bounds(s: &InequalitySystem) -> Vec<f64> {
    s.rows().iter().filter(|r| !r.is_nonnegativity()).map(|r| r.bound).collect()
}

fn close(a: &[f64], b: &[f64]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-9)
}

#[test]
fn lemma2_examples() {
    let ch = fixtures::xor_z_channel();
    let tau = compute_tau(&ch, 0.01).unwrap();
    let unary = lemma2_region(&ch, &fixtures::z_scheme_unary(&[0.5, 0.5]).unwrap(), &tau).unwrap();
    assert!(close(&bounds(&unary), &[1.0, 0.0, 1.0]));
    let copy = lemma2_region(&ch, &fixtures::z_scheme_copy(&[0.5, 0.5]).unwrap(), &tau).unwrap();
    assert!(close(&bounds(&copy), &[1.0, 1.0, 1.0]));

    // Unary X1: every direct-link quantity vanishes.
    let f1 = CondPmf::new(vec![Alphabet::binary("Y1")], vec![Alphabet::unary("X1")], vec![0.5, 0.5]).unwrap();
    let f2 = CondPmf::deterministic(vec![Alphabet::binary("Y2")], vec![Alphabet::unary("X1"), Alphabet::binary("X2")], |i| i).unwrap();
    let ch1 = ChannelSpec::z(f1, f2).unwrap();
    let t1 = compute_tau(&ch1, 0.01).unwrap();
    let r = lemma2_region(&ch1, &fixtures::z_scheme_unary(&[1.0]).unwrap(), &t1).unwrap();
    assert!(close(&bounds(&r)[..1], &[0.0]));

    let and = fixtures::and_z_channel();
    let t = compute_tau(&and, 0.01).unwrap();
    assert!(matches!(lemma2_region(&and, &fixtures::z_scheme_unary(&[0.5, 0.5]).unwrap(), &t), Err(Error::Precondition(_))));
}

#[test]
fn corollary2_examples() {
    let ch = fixtures::xor_z_channel();
    let tau = compute_tau(&ch, 0.01).unwrap();
    let zs = fixtures::z_scheme_copy(&[0.5, 0.5]).unwrap();
    let u2 = bits(0.8, SideMap::Empty);
    let r = corollary2_margins(&bits(1.0, SideMap::Copy), &u2, &ch, &zs, &tau, EPS).unwrap();
    assert!(close(&r.values(), &[0.0, 0.2, 0.2]));
    assert!(!r.feasible);
    assert_eq!(r.binding(), Some("H(U1) < I(X1;Y1)"));

    let blind = bits(0.3, SideMap::Empty);
    let r = corollary2_margins(&blind, &u2, &ch, &zs, &tau, EPS).unwrap();
    assert!((r.values()[2] - (1.0 - 0.3 - 0.8)).abs() < 1e-9);

    let none = fixtures::null_source(SideInfo::Interfering);
    let r = corollary2_margins(&blind, &none, &ch, &zs, &tau, EPS).unwrap();
    assert!((r.values()[1] - 1.0).abs() < 1e-9);

    let no_h = random_source(2, 2, &mut rng::stream(1, &[]));
    assert!(matches!(corollary2_margins(&no_h, &u2, &ch, &zs, &tau, EPS), Err(Error::Configuration(_))));
}

#[test]
fn degraded_message_set_examples() {
    let ch = fixtures::xor_z_channel();
    let tau = compute_tau(&ch, 0.01).unwrap();
    let unary = zchannel_degraded_region(&ch, &fixtures::z_scheme_unary(&[0.5, 0.5]).unwrap(), &tau, 0.0).unwrap();
    assert!(close(&bounds(&unary), &[1.0, 1.0, 0.0, 0.0]));
    let copy = zchannel_degraded_region(&ch, &fixtures::z_scheme_copy(&[0.5, 0.5]).unwrap(), &tau, 0.0).unwrap();
    assert!(close(&bounds(&copy), &[0.0, 1.0, 1.0, 1.0]));
    assert!(matches!(
        zchannel_degraded_region(&ch, &fixtures::z_scheme_copy(&[0.5, 0.5]).unwrap(), &tau, -0.1),
        Err(Error::Domain(_))
    ));
    // Zero common rate leaves a slice in (R1p, R2).
    let slice = copy.substitute("R1c", 0.0).unwrap();
    assert_eq!(slice.variables(), &["R1p".to_string(), "R2".to_string()]);
    assert!(slice.contains(&[0.0, 0.9], 1e-9).unwrap().inside || slice.contains(&[0.0, 0.9], -1e-9).unwrap().min_margin >= 0.0);
}

#[test]
fn appendix_e_examples() {
    let ch = fixtures::xor_z_channel();
    let r = appendix_e_region(&ch, &fixtures::z_scheme_unary(&[0.5, 0.5]).unwrap(), &[0.5, 0.5], 0.0).unwrap();
    assert!(close(&bounds(&r), &[1.0, 1.0, 0.0, 0.0]));
    assert!(appendix_e_region(&ch, &fixtures::z_scheme_unary(&[0.5, 0.5]).unwrap(), &[0.5, 0.5], -1.0).is_err());

    // Under W - X1 - Y1 the first bound is I(X1;Y1|W) at gamma = 0.
    let mut r = rng::stream(4, &[]);
    let f1 = CondPmf::from_rows(vec![Alphabet::binary("Y1")], vec![Alphabet::binary("X1")], &[simplex::random_point(2, &mut r), simplex::random_point(2, &mut r)]).unwrap();
    let f2 = CondPmf::deterministic(vec![Alphabet::binary("Y2")], vec![Alphabet::binary("X1"), Alphabet::binary("X2")], |i| (i >> 1) ^ (i & 1)).unwrap();
    let noisy = ChannelSpec::z(f1, f2).unwrap();
    let k = CondPmf::from_rows(vec![Alphabet::binary("X1")], vec![Alphabet::indexed("W", 3).unwrap()], &[simplex::random_point(2, &mut r), simplex::random_point(2, &mut r), simplex::random_point(2, &mut r)]).unwrap();
    let zs = ZScheme::new(Alphabet::indexed("W", 3).unwrap(), simplex::random_point(3, &mut r), k).unwrap();
    let e = appendix_e_region(&noisy, &zs, &[0.3, 0.7], 0.0).unwrap();
    let t = z_terms(&noisy, &zs, &[0.3, 0.7]).unwrap();
    assert!((e.rows()[0].bound - t.i_x1_y1_given_w).abs() < 1e-12);
}

/// Vertices of the union over a gamma grid cover the Lemma-2 region.
#[test]
fn appendix_e_union_matches_lemma2_vertices() {
    let ch = fixtures::xor_z_channel();
    let tau = compute_tau(&ch, 0.01).unwrap();
    for zs in [fixtures::z_scheme_copy(&[0.5, 0.5]).unwrap(), fixtures::z_scheme_copy(&[0.3, 0.7]).unwrap(), fixtures::z_scheme_unary(&[0.4, 0.6]).unwrap()] {
        let lemma2 = lemma2_region(&ch, &zs, &tau).unwrap();
        let t = z_terms(&ch, &zs, &tau.p_star).unwrap();
        let top = t.i_w_y2_given_x2;
        let gammas: Vec<f64> = (0..=50).map(|i| top * i as f64 / 50.0).collect();
        let pieces: Vec<InequalitySystem> = gammas.iter().map(|&g| appendix_e_region(&ch, &zs, &tau.p_star, g).unwrap()).collect();
        // Every vertex of every piece lies in the Lemma-2 region.
        for p in &pieces {
            for v in p.enumerate_vertices().unwrap() {
                assert!(lemma2.contains(&v.0, 0.0).unwrap().min_margin >= -1e-9);
            }
        }
        // Every Lemma-2 vertex lies in some piece.
        for v in lemma2.enumerate_vertices().unwrap() {
            let best = pieces.iter().map(|p| p.contains(&v.0, 0.0).unwrap().min_margin).fold(f64::NEG_INFINITY, f64::max);
            assert!(best >= -1e-9, "vertex {:?}", v.0);
        }
    }
}

#[test]
fn lemma1_examples() {
    let ch = fixtures::orthogonal_noiseless_channel();
    let b = |s: &str| Alphabet::binary(s);
    let unary = Lemma1Scheme::new(
        Alphabet::unary("S1"), vec![1.0], Alphabet::unary("S2"), vec![1.0],
        CondPmf::new(vec![b("X1")], vec![Alphabet::unary("S1")], vec![0.5, 0.5]).unwrap(),
        CondPmf::new(vec![b("X2")], vec![Alphabet::unary("S2")], vec![0.5, 0.5]).unwrap(),
    )
    .unwrap();
    let r = lemma1_inner_bound_n1(&ch, &unary).unwrap();
    assert!(close(&bounds(&r), &[1.0, 1.0, 1.0, 1.0]));

    let copy = |s: &str, x: &str| CondPmf::deterministic(vec![b(x)], vec![b(s)], |i| i).unwrap();
    let shared = Lemma1Scheme::new(b("S1"), vec![0.5, 0.5], b("S2"), vec![0.5, 0.5], copy("S1", "X1"), copy("S2", "X2")).unwrap();
    let r = lemma1_inner_bound_n1(&ch, &shared).unwrap();
    assert!(close(&bounds(&r), &[0.0, 1.0, 0.0, 1.0]));

    let xor = fixtures::xor_z_channel();
    let s2_unary = Lemma1Scheme::new(
        b("S1"), vec![0.5, 0.5], Alphabet::unary("S2"), vec![1.0], copy("S1", "X1"),
        CondPmf::new(vec![b("X2")], vec![Alphabet::unary("S2")], vec![0.5, 0.5]).unwrap(),
    )
    .unwrap();
    let r = lemma1_inner_bound_n1(&xor, &s2_unary).unwrap();
    assert!((bounds(&r)[2] - 1.0).abs() < 1e-9);
}

#[test]
fn theorem3_examples() {
    let ch = fixtures::xor_z_channel();
    let tau = compute_tau(&ch, 0.01).unwrap();
    let region = lemma2_as_ci_region(&lemma2_region(&ch, &fixtures::z_scheme_copy(&[0.5, 0.5]).unwrap(), &tau).unwrap()).unwrap();

    let copy = bits(0.6, SideMap::Copy);
    let v = theorem3_check(&copy, &copy, &region, EPS).unwrap();
    assert!(close(&v.point, &[0.6, 0.0, 0.6, 0.0]));
    let blind = bits(0.6, SideMap::Empty);
    let v = theorem3_check(&blind, &blind, &region, EPS).unwrap();
    assert!(close(&v.point, &[0.0, 0.6, 0.0, 0.6]));

    // U1 = V1 uniform, H(U2) = 0.8: the sum R1s + R1p meets I(X1;Y1) = 1 exactly,
    // as the first Corollary-2 margin does.
    let u1 = bits(1.0, SideMap::Copy);
    let u2 = bits(0.8, SideMap::Empty);
    let v = theorem3_check(&u1, &u2, &region, EPS).unwrap();
    let c2 = corollary2_margins(&u1, &u2, &ch, &fixtures::z_scheme_copy(&[0.5, 0.5]).unwrap(), &tau, EPS).unwrap();
    assert!(!v.feasible && v.margin.abs() < 1e-9);
    assert!((v.margin - c2.min_margin()).abs() < 1e-9);
    // With H(U1) = 0.9 both report a margin of 0.1.
    let u1 = bits(0.9, SideMap::Copy);
    let v = theorem3_check(&u1, &u2, &region, EPS).unwrap();
    assert!(v.feasible && (v.margin - 0.1).abs() < 1e-9);

    let no_h = random_source(2, 2, &mut rng::stream(1, &[]));
    assert!(matches!(theorem3_check(&no_h, &u2, &region, EPS), Err(Error::Configuration(_))));
}

#[test]
fn margins_are_reproducible() {
    let mut r = rng::stream(99, &[]);
    let (a, b) = (random_source(2, 2, &mut r), random_source(2, 2, &mut r));
    let ch = random_channel(2, 2, &mut r);
    let aux = random_aux_scheme(&a, &b, &ch, &Cardinalities::default(), &mut r).unwrap();
    let x = theorem2_margins(&a, &b, &ch, &aux, EPS).unwrap();
    let y = theorem2_margins(&a, &b, &ch, &aux, EPS).unwrap();
    assert!(x.values().iter().zip(y.values()).all(|(p, q)| p.to_bits() == q.to_bits() && p.is_finite()));
}
