use std::f64::consts::PI;
use std::sync::Arc;

use fourier_dilation::catalog;
use fourier_dilation::cocycle::{self, DEFAULT_RANK_TOL};
use fourier_dilation::crossed::CrossedElement;
use fourier_dilation::gauss::GaussExp;
use fourier_dilation::group::FiniteGroup;
use fourier_dilation::symbols::{self, SymbolFunction};
use fourier_dilation::C64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn small_group() -> impl Strategy<Value = FiniteGroup> {
    prop_oneof![
        (1usize..10).prop_map(|n| FiniteGroup::cyclic(n).unwrap()),
        (2usize..6).prop_map(|n| FiniteGroup::dihedral(n).unwrap()),
        (1usize..5).prop_map(|n| FiniteGroup::symmetric(n).unwrap()),
        (1usize..4, 1usize..4).prop_map(|(a, b)| {
            FiniteGroup::direct_product(&FiniteGroup::cyclic(a).unwrap(), &FiniteGroup::cyclic(b).unwrap()).unwrap()
        }),
    ]
}

/// `sum_k w_k (2 - 2 cos(2 pi k s / n))` on `Z_n`, of negative type for
/// nonnegative weights.
fn cyclic_psi() -> impl Strategy<Value = SymbolFunction> {
    (2usize..10).prop_flat_map(|n| (Just(n), prop::collection::vec(0.0f64..3.0, n / 2))).prop_map(|(n, w)| {
        let g = Arc::new(FiniteGroup::cyclic(n).unwrap());
        let values: Vec<f64> = (0..n)
            .map(|s| {
                w.iter()
                    .enumerate()
                    .map(|(k, wk)| wk * (2.0 - 2.0 * (2.0 * PI * ((k + 1) * s) as f64 / n as f64).cos()))
                    .sum()
            })
            .collect();
        SymbolFunction::from_real(g, &values).unwrap()
    })
}

fn freq(dim: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-2.0f64..2.0, dim)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn group_axioms(g in small_group()) {
        for a in g.elements() {
            prop_assert_eq!(g.mul(a, g.inv(a)), 0);
            prop_assert_eq!(g.mul(0, a), a);
            for b in g.elements() {
                for c in g.elements() {
                    prop_assert_eq!(g.mul(g.mul(a, b), c), g.mul(a, g.mul(b, c)));
                }
            }
        }
    }

    #[test]
    fn cayley_text_round_trip(g in small_group()) {
        let back = FiniteGroup::parse_cayley(&g.to_cayley_text()).unwrap();
        prop_assert_eq!(back.cayley_rows(), g.cayley_rows());
    }

    #[test]
    fn negative_type_symbols_give_cocycles(psi in cyclic_psi()) {
        let report = symbols::is_cond_negative_type(&psi, 1e-10).unwrap();
        prop_assert!(report.verdict, "{:?}", report.failure);
        let c = cocycle::extract_cocycle(&psi, DEFAULT_RANK_TOL).unwrap();
        prop_assert!(c.dim() < psi.group().order());
        prop_assert!(cocycle::verify_cocycle_law(&c, 1e-9).pass);
        for s in psi.group().elements() {
            prop_assert!((c.b(s).norm_squared() - psi.value(s).re).abs() < 1e-9);
        }
    }

    #[test]
    fn semigroup_symbols_are_positive_definite(psi in cyclic_psi(), t in 0.0f64..4.0) {
        let phi = symbols::semigroup_symbol(&psi, t).unwrap();
        let pd = symbols::is_positive_definite(&phi, 1e-10);
        prop_assert!(pd.verdict, "min eigenvalue {}", pd.min_eigenvalue);
    }

    #[test]
    fn gaussian_characters(h in freq(3), k in freq(3)) {
        let (a, b) = (GaussExp::exponential(&h), GaussExp::exponential(&k));
        let sum: Vec<f64> = h.iter().zip(&k).map(|(x, y)| x + y).collect();
        let want = (-sum.iter().map(|x| x * x).sum::<f64>() / 2.0).exp();
        prop_assert!((a.mul(&b).unwrap().expectation() - C64::new(want, 0.0)).norm() < 1e-12);
        // e^{iW(h)}* = e^{-iW(h)}, so a* a = 1
        prop_assert!(a.adjoint().mul(&a).unwrap().distance(&GaussExp::one(3)) < 1e-12);
    }

    #[test]
    fn crossed_product_is_a_star_algebra(seed in any::<u64>(), name in prop::sample::select(catalog::BUILTINS)) {
        let fixture = catalog::builtin(name).unwrap();
        let c = Arc::new(cocycle::extract_cocycle(&fixture.psi, DEFAULT_RANK_TOL).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let [f, g, h] = [0; 3].map(|_| CrossedElement::random(c.clone(), 2, &mut rng));
        let left = f.mul(&g).unwrap().mul(&h).unwrap();
        let right = f.mul(&g.mul(&h).unwrap()).unwrap();
        prop_assert!(left.distance(&right) < 1e-9);
        let adj = f.mul(&g).unwrap().adjoint();
        prop_assert!(adj.distance(&g.adjoint().mul(&f.adjoint()).unwrap()) < 1e-9);
        prop_assert!(f.adjoint().adjoint().distance(&f) < 1e-12);
    }
}
