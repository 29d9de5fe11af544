//! Acceptance criteria, one PASS/FAIL line each. Runs without the libtest
//! harness so the report is printed even when every check passes.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::Instant;

use ar_jordan::classifier::{
    carlson_indecomposability, carlson_type_set, sl2_family_types, Ambient, Descriptor, ModuleSize, OddPullback,
    ProjectiveCount, Sl2Family, VerdictKind,
};
use ar_jordan::component::{build_cartan_pair, solve_multiplicities, tube_forward, TubeProfile};
use ar_jordan::jordan::{dominance_compare, restrict};
use ar_jordan::oracle::{
    abelian_rank2_models, ga2_model, heisenberg_model, jordan_block, jordan_type_of, pi_point_sweep, NilpotentModel,
};
use ar_jordan::quiver::{
    minimal_additive_function, EventualLevel, QuiverWindow, Tree, TreeClass, Vertex, VertexFunction,
};
use ar_jordan::{DominanceConvention, DominanceResult, Error, JordanType};
use num_bigint::{BigInt, BigUint};
use num_traits::{Signed, Zero};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<(), String>;
type QlCase = (&'static str, Box<dyn Fn(usize) -> u64>, usize, bool);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: Error) -> String {
    e.to_string()
}

fn jt(p: usize, s: &str) -> JordanType {
    JordanType::parse(p, s).expect("valid type text")
}

fn big(v: &[u64]) -> Vec<BigUint> {
    v.iter().map(|&x| BigUint::from(x)).collect()
}

fn matrix_inversion() -> Check {
    for p in [2, 3, 5, 7, 11, 13, 31, 101] {
        let c = build_cartan_pair(p).map_err(err)?;
        let id: Vec<Vec<i64>> = (0..p).map(|i| (0..p).map(|j| i64::from(i == j)).collect()).collect();
        ensure(c.a_times_b() == id && c.b_times_a() == id, || {
            format!("A and B are not inverse at p = {p}")
        })?;
    }
    Ok(())
}

fn restriction_oracle() -> Check {
    let start = Instant::now();
    for p in [3, 5, 7, 11, 13] {
        for i in 1..=p {
            let block = jordan_block(p, i).map_err(err)?;
            for j in 1..=p {
                let found = jordan_type_of(&block.power(j).map_err(err)?);
                let formula = restrict(i, j, p).map_err(err)?;
                ensure(found == formula, || {
                    format!("p={p} i={i} j={j}: oracle {found}, formula {formula}")
                })?;
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 1.0, || format!("took {secs:.2}s"))
}

fn heisenberg_pinned() -> Check {
    for p in [3, 5, 7] {
        let found = jordan_type_of(&heisenberg_model(p).map_err(err)?);
        let mut counts = vec![2u64; p];
        counts[p - 1] = 1;
        let expected = JordanType::from_counts(p, &counts).map_err(err)?;
        ensure(found == expected, || format!("p={p}: oracle {found}"))?;

        let cartan = build_cartan_pair(p).map_err(err)?;
        let mut n = vec![BigUint::zero(); p - 1];
        n[0] = 1u8.into();
        for ql in 1..=10u64 {
            let t = tube_forward(&found, &n, &cartan, ql, true).map_err(err)?;
            for i in 1..=p {
                let want = match i {
                    1 => 2,
                    2 => 3 * ql - 1,
                    i if i == p => ql,
                    _ => 2 * ql,
                };
                ensure(t.multiplicity(i) == BigUint::from(want), || {
                    format!("p={p} ql={ql} i={i}: got {}, want {want}", t.multiplicity(i))
                })?;
            }
        }
    }
    Ok(())
}

fn abelian_pinned() -> Check {
    for p in [3, 5, 7] {
        let (a, b) = abelian_rank2_models(p).map_err(err)?;
        let (ta, tb) = (jordan_type_of(&a), jordan_type_of(&b));
        ensure(ta == jt(p, &format!("{p}[1]")), || format!("p={p}: alpha gives {ta}"))?;
        ensure(tb == jt(p, &format!("{}[1]+[2]", p - 2)), || {
            format!("p={p}: beta gives {tb}")
        })?;
    }
    Ok(())
}

fn ga2_pinned() -> Check {
    for p in [3, 5, 7, 11] {
        let found = jordan_type_of(&ga2_model(p).map_err(err)?.1);
        let expected = jt(p, &format!("[{}]+[{}]", (p - 1) / 2, p.div_ceil(2)));
        ensure(found == expected, || format!("p={p}: {found}"))?;
        let formula = restrict(p, 2, p).map_err(err)?;
        ensure(found.same_blocks(&formula), || {
            format!("p={p}: restriction gives {formula}")
        })?;
    }
    Ok(())
}

fn dominance_footnote() -> Check {
    let a = JordanType::from_counts(3, &[2, 0, 1]).map_err(err)?;
    let b = JordanType::from_counts(3, &[1, 2, 0]).map_err(err)?;
    let ours = dominance_compare(&a, &b, DominanceConvention::PaperOrder).map_err(err)?;
    let theirs = dominance_compare(&a, &b, DominanceConvention::CfpOrder).map_err(err)?;
    ensure(ours == DominanceResult::Greater, || {
        format!("image-dimension order gave {ours}")
    })?;
    ensure(theirs == DominanceResult::Incomparable, || {
        format!("partial-sum order gave {theirs}")
    })
}

fn sweep_cardinality() -> Check {
    for p in [5, 7] {
        for n in 1..p {
            let base = NilpotentModel::new(p as u64, jordan_block(p, n).map_err(err)?.matrix().clone()).map_err(err)?;
            let count = pi_point_sweep(&base).map_err(err)?.len();
            ensure(count == n, || format!("p={p} n={n}: {count} types"))?;
        }
    }
    Ok(())
}

fn tree_class_counts() -> Check {
    let cases = [
        (TreeClass::A12Tilde, 1),
        (TreeClass::AInfInf, 1),
        (TreeClass::DInf, 2),
        (TreeClass::DTilde(4), 2),
        (TreeClass::DTilde(5), 2),
        (TreeClass::DTilde(6), 2),
        (TreeClass::E6Tilde, 3),
        (TreeClass::E7Tilde, 4),
        (TreeClass::E8Tilde, 6),
    ];
    for (tc, want) in cases {
        let m = minimal_additive_function(&tc, 8).map_err(err)?;
        ensure(m.is_additive(), || format!("{tc}: not additive"))?;
        ensure(m.image_size == Some(want), || {
            format!("{tc}: image size {:?}, want {want}", m.image_size)
        })?;
    }
    Ok(())
}

/// All `(entries ≤ bound)^len` vectors.
fn grid(len: usize, bound: u64) -> Vec<Vec<u64>> {
    (0..len).fold(vec![vec![]], |acc, _| {
        acc.into_iter()
            .flat_map(|v| {
                (0..=bound).map(move |x| {
                    let mut w = v.clone();
                    w.push(x);
                    w
                })
            })
            .collect()
    })
}

fn round_trip() -> Check {
    let (mut solved, mut rejected) = (0usize, 0usize);
    for p in [3, 5] {
        let cartan = build_cartan_pair(p).map_err(err)?;
        for seed in grid(p, 3) {
            let seed_jt = JordanType::from_counts(p, &seed).map_err(err)?;
            for n in grid(p - 1, 2) {
                // c = A n, computed here so that failing profiles can be inspected
                let c: Vec<BigInt> = (0..p)
                    .map(|i| {
                        n.iter()
                            .enumerate()
                            .map(|(l, &x)| BigInt::from(cartan.a()[i][l]) * x)
                            .sum()
                    })
                    .collect();
                let slopes = seed.iter().zip(&c).map(|(&a, ci)| BigInt::from(a) - ci).collect();
                let profile = TubeProfile::new(p, slopes, c, 1, true).map_err(err)?;
                match profile.validate() {
                    Ok(()) => {
                        let back = solve_multiplicities(&profile, &cartan).map_err(err)?;
                        ensure(back.n == big(&n), || {
                            format!("p={p} seed={seed:?} n={n:?}: solved {:?}", back.n)
                        })?;
                        let forward = tube_forward(&seed_jt, &big(&n), &cartan, 3, true).map_err(err)?;
                        ensure(forward == profile.at(3).map_err(err)?, || {
                            "forward map disagrees".into()
                        })?;
                        solved += 1;
                    }
                    Err(Error::NegativeMultiplicity { i, ql, value }) => {
                        let ql = u64::try_from(&ql).map_err(|_| "huge quasi-length".to_string())?;
                        let actual = profile.value(i, ql);
                        ensure(actual == value && actual.is_negative(), || {
                            format!("p={p} seed={seed:?} n={n:?}: reported alpha_{i}({ql}) = {value}, actual {actual}")
                        })?;
                        rejected += 1;
                    }
                    Err(e) => return Err(e.to_string()),
                }
            }
        }
    }
    ensure(solved > 0 && rejected > 0, || {
        format!("degenerate sweep: {solved} solved, {rejected} rejected")
    })
}

/// The profile with `s_i = 0` for `i < p`, `s_p = 1` and
/// `t = e_{a+1} + e_{p-a-1} - e_p`.
fn sl2_profile(p: usize, a: usize) -> TubeProfile {
    let mut slopes = vec![BigInt::zero(); p];
    slopes[p - 1] = 1.into();
    let mut t = vec![BigInt::zero(); p];
    t[a] += 1;
    t[p - a - 2] += 1;
    t[p - 1] -= 1;
    TubeProfile::new(p, slopes, t, 1, true).expect("well-formed profile")
}

fn sl2_multiplicities() -> Check {
    for p in [5, 7] {
        let cartan = build_cartan_pair(p).map_err(err)?;
        for a in 0..=p - 2 {
            let n = solve_multiplicities(&sl2_profile(p, a), &cartan).map_err(err)?.n;
            let stated: Vec<BigUint> = (1..p).map(|i| BigUint::from(i.min(a + 1).min(p - i))).collect();
            ensure(n == stated, || {
                let show = |v: &[BigUint]| v.iter().map(ToString::to_string).collect::<Vec<_>>().join(",");
                format!(
                    "p={p} a={a}: B t = ({}), stated min(i, a+1, p-i) = ({}); B t matches min(i, a+1, p-a-1, p-i)",
                    show(&n),
                    show(&stated)
                )
            })?;
        }
    }
    Ok(())
}

fn run_prop<S: Strategy>(cases: u32, strategy: S, test: impl Fn(S::Value) -> Result<(), TestCaseError>) -> Check {
    let mut runner = TestRunner::new(Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    });
    runner.run(&strategy, test).map_err(|e| e.to_string())
}

fn interior_component(w: &QuiverWindow, start: usize) -> BTreeSet<usize> {
    let mut seen = BTreeSet::from([start]);
    let mut stack = vec![start];
    while let Some(v) = stack.pop() {
        let next: Vec<usize> = w.predecessors(v).chain(w.successors(v)).map(|(x, _)| x).collect();
        for x in next {
            if w.is_interior(x) && seen.insert(x) {
                stack.push(x);
            }
        }
    }
    seen
}

fn positivity(target: usize) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (mut accepted, mut with_zero) = (0, 0);
    while accepted < target {
        let rank = rng.gen_range(1..=4);
        let depth = rng.gen_range(3..=7);
        let w = QuiverWindow::tube(rank, depth).map_err(err)?;
        let levels: Vec<u64> = (0..depth).map(|_| rng.gen_range(0..=3)).collect();
        let f = VertexFunction::from_fn(&w, |v| match *v {
            Vertex::Tube { q, .. } => levels[q - 1],
            Vertex::Zt { .. } => unreachable!(),
        });
        if !f.is_tau_invariant() || !f.classify().is_subadditive {
            continue;
        }
        accepted += 1;
        if let Some(zero) = (0..w.vertices().len()).find(|&v| w.is_interior(v) && f.value(v) == 0) {
            with_zero += 1;
            for v in interior_component(&w, zero) {
                ensure(f.value(v) == 0, || {
                    format!("levels {levels:?}: {} is nonzero", w.vertices()[v])
                })?;
            }
        }
    }
    ensure(with_zero > 0, || "no sample vanished anywhere".into())
}

fn psi_identities() -> Check {
    let strategy = (2usize..=13).prop_flat_map(|p| (Just(p), prop::collection::vec(0u64..50, p)));
    run_prop(1000, strategy, |(p, counts)| {
        let t = JordanType::from_counts(p, &counts).unwrap();
        prop_assert_eq!(t.psi(p - 1).unwrap(), t.stable_dimension());
        for m in 1..p {
            prop_assert_eq!(
                t.ker_dim(m).unwrap(),
                t.psi(m).unwrap() + t.multiplicity(p) * BigUint::from(m)
            );
        }
        Ok(())
    })
}

fn level_labels() -> Check {
    let windows = [
        QuiverWindow::tube(1, 6).map_err(err)?,
        QuiverWindow::tube(3, 8).map_err(err)?,
        QuiverWindow::zt(Tree::a_inf(6).map_err(err)?, 0, 6).map_err(err)?,
        QuiverWindow::zt(Tree::a_inf(9).map_err(err)?, -2, 5).map_err(err)?,
    ];
    for w in &windows {
        let cases: [QlCase; 3] = [
            ("ql", Box::new(|q| q as u64), 1, true),
            ("const", Box::new(|_| 4), 2, false),
            ("ql-1", Box::new(|q| q as u64 - 1), 2, false),
        ];
        for (name, f, level, additive) in cases {
            let r = VertexFunction::from_ql(w, f).map_err(err)?.classify();
            ensure(
                r.eventual_level == EventualLevel::Level(level) && r.is_additive == additive,
                || format!("{name}: {r:?}"),
            )?;
        }
    }
    Ok(())
}

fn property_suites() -> Check {
    positivity(500).map_err(|e| format!("positivity: {e}"))?;
    psi_identities().map_err(|e| format!("psi identities: {e}"))?;
    level_labels().map_err(|e| format!("levels: {e}"))
}

fn descriptor_grid() -> Vec<Descriptor> {
    let mut out = Vec::new();
    for p in [3u64, 5, 7] {
        for degree in 1..=4 {
            for nilpotent in [false, true] {
                let pullbacks: &[Option<OddPullback>] = if degree % 2 == 1 {
                    &[
                        Some(OddPullback::Mixed),
                        Some(OddPullback::AllVanish),
                        Some(OddPullback::NoneVanish),
                    ]
                } else {
                    &[None]
                };
                for &odd_pullback in pullbacks {
                    for srk in [None, Some(1), Some(2)] {
                        for srk_quotient in [None, Some(1), Some(2)] {
                            for is_finite_group in [false, true] {
                                for (equidim, variety_dim, ambient_dim) in [
                                    (false, None, None),
                                    (true, Some(6), Some(9)),
                                    (true, Some(5), Some(9)),
                                    (false, Some(6), Some(9)),
                                ] {
                                    out.push(Descriptor {
                                        p,
                                        degree,
                                        nilpotent,
                                        dim_l: None,
                                        support_full: None,
                                        odd_pullback,
                                        ambient: Ambient {
                                            equidim,
                                            variety_dim,
                                            ambient_dim,
                                            srk,
                                            srk_quotient,
                                            is_finite_group,
                                            ..Ambient::default()
                                        },
                                    });
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

/// The rule table, evaluated independently of the library.
fn expected_rule(d: &Descriptor) -> Option<&'static str> {
    let a = &d.ambient;
    let even = d.degree.is_multiple_of(2);
    if even && d.nilpotent {
        Some("CNED1")
    } else if !even && d.odd_pullback == Some(OddPullback::Mixed) {
        Some("COD1.2")
    } else if !even && a.srk_quotient.or(a.srk).is_some_and(|s| s >= 2) {
        Some("COD3")
    } else if !even && a.is_finite_group {
        Some("COD5")
    } else if even && a.equidim && matches!((a.variety_dim, a.ambient_dim), (Some(n), Some(m)) if 2 * n >= m + 3) {
        Some("CNN1")
    } else {
        None
    }
}

/// Stable parts predicted for the class, as block lists.
fn expected_shape(d: &Descriptor) -> Vec<Vec<usize>> {
    let p = d.p as usize;
    if d.degree.is_multiple_of(2) {
        if d.nilpotent {
            vec![vec![1, p - 1]]
        } else {
            vec![vec![], vec![1, p - 1]]
        }
    } else {
        match d.odd_pullback.unwrap() {
            OddPullback::Mixed => vec![vec![p - 1, p - 1], vec![p - 2]],
            OddPullback::AllVanish => vec![vec![p - 1, p - 1]],
            OddPullback::NoneVanish => vec![vec![p - 2]],
        }
    }
}

fn classifier_conformance() -> Check {
    for d in descriptor_grid() {
        let p = d.p as usize;
        let verdict = carlson_indecomposability(&d).map_err(err)?;
        let want = expected_rule(&d);
        ensure(verdict.rule.as_deref() == want, || {
            format!("{d:?}: rule {:?}, want {want:?}", verdict.rule)
        })?;
        let kind_ok = match want {
            Some(_) => verdict.kind == VerdictKind::Indecomposable,
            None => verdict.kind == VerdictKind::Unknown,
        };
        ensure(kind_ok, || format!("{d:?}: kind {:?}", verdict.kind))?;

        let types = carlson_type_set(&d).map_err(err)?;
        let shapes = expected_shape(&d);
        ensure(types.len() == shapes.len(), || format!("{d:?}: {} types", types.len()))?;
        for (t, blocks) in types.iter().zip(&shapes) {
            let mut want = JordanType::zero(p).map_err(err)?;
            for &b in blocks {
                want = want.direct_sum(&JordanType::block(p, b).map_err(err)?).map_err(err)?;
            }
            ensure(
                t.stable == want && matches!(t.projectives, ProjectiveCount::Symbolic(_)),
                || format!("{d:?}: predicted {t}"),
            )?;
        }

        // With a dimension, counts follow by exact division.
        let mut sized = d.clone();
        let stable_dim: usize = shapes.last().unwrap().iter().sum();
        sized.dim_l = Some(BigUint::from(stable_dim + 3 * p));
        let known: Vec<JordanType> = carlson_type_set(&sized)
            .map_err(err)?
            .iter()
            .filter_map(|t| t.known())
            .collect();
        ensure(known.len() == shapes.len(), || format!("{sized:?}: counts missing"))?;
        ensure(
            known.iter().all(|t| t.dimension() == BigUint::from(stable_dim + 3 * p)),
            || format!("{sized:?}: unequal dimensions"),
        )?;
        sized.dim_l = Some(BigUint::from(stable_dim + 3 * p + 1));
        ensure(carlson_type_set(&sized).is_err(), || {
            format!("{sized:?}: bad dimension accepted")
        })?;
    }

    let p = 5;
    for i in 1..=(p - 1) / 2 {
        for ql in 1..=4u64 {
            let set = sl2_family_types(p, Sl2Family::Sl2, i, 0, &ModuleSize::Ql(ql.into())).map_err(err)?;
            let want = vec![
                jt(p, &format!("{ql}[5]")),
                jt(p, &format!("[{i}]+[{}]+{}[5]", p - i, ql - 1)),
            ];
            ensure(set == want, || format!("tube family i={i} ql={ql}: {set:?}"))?;
            let dim = ql * p as u64;
            let set = sl2_family_types(p, Sl2Family::Sl2Tr, i, 0, &ModuleSize::Dim(dim.into())).map_err(err)?;
            ensure(set == want, || format!("torus family i={i} dim={dim}: {set:?}"))?;
        }
    }
    for s in 1..p {
        for k in 0..3u64 {
            let dim = s as u64 + k * p as u64;
            let set = sl2_family_types(p, Sl2Family::Sl2, s, 1, &ModuleSize::Dim(dim.into())).map_err(err)?;
            ensure(set == vec![jt(p, &format!("[{s}]+{k}[5]"))], || {
                format!("constant s={s} dim={dim}: {set:?}")
            })?;
        }
        let bad = sl2_family_types(p, Sl2Family::Sl2, s, 1, &ModuleSize::Dim((s as u64 + 1).into()));
        ensure(bad.is_err(), || {
            format!("constant s={s}: incompatible dimension accepted")
        })?;
    }
    Ok(())
}

fn main() -> ExitCode {
    #[allow(clippy::type_complexity)]
    let criteria: [(&str, fn() -> Check); 12] = [
        ("matrix inversion A B = B A = I", matrix_inversion),
        ("restriction formula equals matrix oracle", restriction_oracle),
        ("Heisenberg type and tube formulas", heisenberg_pinned),
        ("rank-2 abelian pinned types", abelian_pinned),
        ("G_a(2) pinned type", ga2_pinned),
        ("dominance conventions", dominance_footnote),
        ("sweep cardinality", sweep_cardinality),
        ("tree-class stable-type counts", tree_class_counts),
        ("tube inverse round trip", round_trip),
        ("SL(2) multiplicity pattern min(i, a+1, p-i)", sl2_multiplicities),
        ("property suites", property_suites),
        ("classifier conformance", classifier_conformance),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let ms = start.elapsed().as_millis();
        match result {
            Ok(()) => println!("criterion {:>2} PASS  {name} ({ms} ms)", k + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name} ({ms} ms): {msg}", k + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
