use ar_jordan::classifier::{carlson_type_set, endo_trivial, Ambient, Descriptor, OddPullback};
use ar_jordan::component::{build_cartan_pair, solve_multiplicities, tube_profile, TubeProfile};
use ar_jordan::jordan::restrict;
use ar_jordan::oracle::{
    conjugation_fuzz, jordan_block, jordan_type_of, pi_point_sweep, pi_point_sweep_type, FpMatrix, NilpotentModel,
};
use ar_jordan::quiver::{QuiverWindow, Vertex, VertexFunction};
use ar_jordan::{DominanceConvention, JordanType};
use num_bigint::{BigInt, BigUint};
use num_traits::Zero;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const PRIMES: [usize; 6] = [2, 3, 5, 7, 11, 13];

fn jordan_type() -> impl Strategy<Value = JordanType> {
    (1usize..=11)
        .prop_flat_map(|p| prop::collection::vec(0u64..6, p).prop_map(move |c| JordanType::from_counts(p, &c).unwrap()))
}

fn same_size_pair() -> impl Strategy<Value = (JordanType, JordanType)> {
    (2usize..=6, 1u64..=12).prop_flat_map(|(p, d)| {
        let part = move || prop::collection::vec(1usize..=p, 0..=d as usize);
        (part(), part()).prop_map(move |(x, y)| (fill(p, d, &x), fill(p, d, &y)))
    })
}

/// Greedy blocks from `sizes` until dimension `d`, padded with `[1]`.
fn fill(p: usize, d: u64, sizes: &[usize]) -> JordanType {
    let mut counts = vec![0u64; p];
    let mut left = d as usize;
    for &s in sizes {
        if s <= left {
            counts[s - 1] += 1;
            left -= s;
        }
    }
    counts[0] += left as u64;
    JordanType::from_counts(p, &counts).unwrap()
}

/// A random nilpotent operator of order at most `p`: strictly lower
/// triangular on a space of dimension at most `p`, then conjugated.
fn nilpotent_model() -> impl Strategy<Value = NilpotentModel> {
    (prop::sample::select(vec![3u64, 5, 7]), any::<u64>()).prop_flat_map(|(p, seed)| {
        let n = p as usize;
        prop::collection::vec(0..p, n * n).prop_map(move |vals| {
            let entries: Vec<_> = (0..n)
                .flat_map(|r| (0..r).map(move |c| (r, c)))
                .map(|(r, c)| (r, c, vals[r * n + c] as i64))
                .collect();
            let base = NilpotentModel::from_entries(p, n, &entries).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            base.conjugate(&FpMatrix::random_invertible(&mut rng, p, n)).unwrap()
        })
    })
}

/// Level values from a start and nonincreasing steps, clipped at zero;
/// mostly subadditive, with zeros common.
fn concave_levels() -> impl Strategy<Value = Vec<u64>> {
    (0i64..=3, prop::collection::vec(-2i64..=2, 2..=6)).prop_map(|(first, mut steps)| {
        steps.sort_unstable_by(|a, b| b.cmp(a));
        let mut out = vec![first];
        for s in steps {
            out.push(out.last().unwrap() + s);
        }
        out.into_iter().map(|v| v.max(0) as u64).collect()
    })
}

proptest! {
    #[test]
    fn text_and_json_round_trip(t in jordan_type()) {
        let p = t.modulus();
        prop_assert_eq!(JordanType::parse(p, &t.to_string()).unwrap(), t.clone());
        prop_assert_eq!(JordanType::parse(p, &format!("{t:#}")).unwrap(), t.clone());
        let back: JordanType = serde_json::from_str(&serde_json::to_string(&t).unwrap()).unwrap();
        prop_assert_eq!(back, t);
    }

    #[test]
    fn restriction_preserves_dimension(t in jordan_type(), j in 1usize..=11) {
        prop_assume!(j <= t.modulus());
        let r = t.restrict_type(j).unwrap();
        prop_assert_eq!(r.dimension(), t.dimension());
        prop_assert_eq!(r.modulus(), t.modulus().div_ceil(j));
        prop_assert_eq!(t.restrict_type(1).unwrap(), t);
    }

    #[test]
    fn kernel_and_image_split_dimension(t in jordan_type()) {
        for m in 1..=t.modulus() {
            prop_assert_eq!(t.ker_dim(m).unwrap() + t.image_dim(m).unwrap(), t.dimension());
        }
    }

    #[test]
    fn syzygy_is_an_involution_on_stable_parts(t in jordan_type()) {
        prop_assert_eq!(t.syzygy().syzygy(), t.stable_part());
    }

    #[test]
    fn dominance_is_antisymmetric((a, b) in same_size_pair()) {
        for conv in [DominanceConvention::PaperOrder, DominanceConvention::CfpOrder] {
            let ab = ar_jordan::jordan::dominance_compare(&a, &b, conv).unwrap();
            let ba = ar_jordan::jordan::dominance_compare(&b, &a, conv).unwrap();
            prop_assert_eq!(ab, ba.reversed());
            prop_assert_eq!(
                ar_jordan::jordan::dominance_compare(&a, &a, conv).unwrap(),
                ar_jordan::DominanceResult::Equal
            );
        }
    }

    #[test]
    fn rank_sequence_is_convex(model in nilpotent_model()) {
        let r = model.rank_sequence();
        for m in 1..r.len() - 1 {
            prop_assert!(r[m - 1] - r[m] >= r[m] - r[m + 1]);
        }
        prop_assert_eq!(jordan_type_of(&model).dimension(), BigUint::from(model.dim()));
    }

    #[test]
    fn sweep_starts_at_the_base_type(model in nilpotent_model()) {
        let base = jordan_type_of(&model);
        let first = jordan_type_of(&model.power(1).unwrap()).stable_part();
        prop_assert_eq!(&first, &base.stable_part());
        prop_assert!(pi_point_sweep(&model).unwrap().contains(&first));
        prop_assert_eq!(pi_point_sweep(&model).unwrap(), pi_point_sweep_type(&base).unwrap());
    }

    #[test]
    fn jordan_type_survives_conjugation(model in nilpotent_model(), seed in any::<u64>()) {
        prop_assert_eq!(conjugation_fuzz(&model, 3, seed).unwrap().failures, 0);
    }

    #[test]
    fn tube_round_trip(
        p in prop::sample::select(vec![3usize, 5, 7]),
        seed in prop::collection::vec(0u64..8, 7),
        n in prop::collection::vec(0u64..3, 6),
    ) {
        let cartan = build_cartan_pair(p).unwrap();
        let seed = JordanType::from_counts(p, &seed[..p]).unwrap();
        let n: Vec<BigUint> = n[..p - 1].iter().map(|&x| x.into()).collect();
        if let Ok(profile) = tube_profile(&seed, &n, &cartan, true) {
            prop_assert_eq!(solve_multiplicities(&profile, &cartan).unwrap().n, n);
        }
    }

    #[test]
    fn endo_trivial_ignores_projectives(i in prop::sample::select(vec![1usize, 2, 4]), extra in prop::collection::vec(0u64..4, 1..4)) {
        let p = 5;
        let set: Vec<JordanType> = extra.iter().map(|&k| JordanType::block(p, i).unwrap().with_projectives(&k.into())).collect();
        let bare = vec![JordanType::block(p, i).unwrap()];
        prop_assert_eq!(endo_trivial(&set).unwrap(), endo_trivial(&bare).unwrap());
        prop_assert_eq!(endo_trivial(&bare).unwrap(), i != 2);
    }

    #[test]
    fn predicted_types_share_a_dimension(
        p in prop::sample::select(vec![3u64, 5, 7]),
        degree in 1u64..=6,
        nilpotent in any::<bool>(),
        k in 2u64..10,
        pull in prop::sample::select(vec![OddPullback::Mixed, OddPullback::AllVanish, OddPullback::NoneVanish]),
    ) {
        let even = degree % 2 == 0;
        // every pattern's stable part is congruent to 0 or -2 mod p
        let dim = if even { k * p } else { k * p - 2 };
        let d = Descriptor {
            p, degree, nilpotent,
            dim_l: Some(dim.into()),
            support_full: None,
            odd_pullback: (!even).then_some(pull),
            ambient: Ambient::default(),
        };
        for t in carlson_type_set(&d).unwrap() {
            prop_assert_eq!(t.known().unwrap().dimension(), BigUint::from(dim));
        }
    }

    #[test]
    fn positivity_on_tubes(rank in 1usize..=4, levels in concave_levels()) {
        let w = QuiverWindow::tube(rank, levels.len()).unwrap();
        let f = VertexFunction::from_fn(&w, |v| match *v {
            Vertex::Tube { q, .. } => levels[q - 1],
            Vertex::Zt { .. } => unreachable!(),
        });
        prop_assume!(f.classify().is_subadditive);
        let interior: Vec<usize> = (0..w.vertices().len()).filter(|&v| w.is_interior(v)).collect();
        if interior.iter().any(|&v| f.value(v) == 0) {
            // tube interiors are connected, so the zero spreads everywhere
            prop_assert!(interior.iter().all(|&v| f.value(v) == 0));
        }
    }
}

#[test]
fn restriction_matches_block_powers_up_to_13() {
    for p in PRIMES {
        for i in 1..=p {
            let block = jordan_block(p, i).unwrap();
            for j in 1..=p {
                assert_eq!(
                    jordan_type_of(&block.power(j).unwrap()),
                    restrict(i, j, p).unwrap(),
                    "p={p} i={i} j={j}"
                );
            }
        }
    }
}

/// The `[p]`-row-free profile `t = e_{a+1} + e_{p-a-1} - e_p`, `s_p = 1`
/// solves to `n_i = min(i, a+1, p-a-1, p-i)`.
#[test]
fn sl2_profile_multiplicities() {
    for p in [3usize, 5, 7, 11, 13] {
        let cartan = build_cartan_pair(p).unwrap();
        for a in 0..=p - 2 {
            let mut s = vec![BigInt::zero(); p];
            s[p - 1] = 1.into();
            let mut t = vec![BigInt::zero(); p];
            t[a] += 1;
            t[p - a - 2] += 1;
            t[p - 1] -= 1;
            let profile = TubeProfile::new(p, s, t, 1, true).unwrap();
            let n = solve_multiplicities(&profile, &cartan).unwrap().n;
            let want: Vec<BigUint> = (1..p)
                .map(|i| BigUint::from(i.min(a + 1).min(p - a - 1).min(p - i)))
                .collect();
            assert_eq!(n, want, "p={p} a={a}");
        }
    }
}
