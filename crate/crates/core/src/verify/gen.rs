//! Random exterior forms, polynomials, maps and differential forms.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::diffeology::sampling::random_rational;
use crate::expr::{BoxDomain, PolyExpr, SmoothMap};
use crate::exterior::{ExteriorForm, MultiIndex};
use crate::forms::DifferentialForm;
use crate::scalar::Rational;

fn small(rng: &mut ChaCha8Rng) -> Rational {
    random_rational(rng, 3, 3)
}

pub fn exterior_form(rng: &mut ChaCha8Rng, dim: usize, degree: usize) -> ExteriorForm {
    let mut coeffs: Vec<(Vec<usize>, Rational)> = Vec::new();
    for k in MultiIndex::all(dim, degree) {
        if rng.gen_bool(0.7) {
            coeffs.push((k.as_slice().to_vec(), small(rng)));
        }
    }
    ExteriorForm::from_coeffs(dim, degree, coeffs).expect("valid indices")
}

pub fn vectors(rng: &mut ChaCha8Rng, dim: usize, count: usize) -> Vec<Vec<Rational>> {
    (0..count).map(|_| (0..dim).map(|_| small(rng)).collect()).collect()
}

/// A polynomial in `n` variables with at most `terms` terms of total degree `<= max_degree`.
pub fn poly(rng: &mut ChaCha8Rng, n: usize, max_degree: u32, terms: usize) -> PolyExpr {
    let mut p = PolyExpr::zero(n);
    for _ in 0..terms {
        let mut left = rng.gen_range(0..=max_degree);
        let mut exp = vec![0u32; n];
        while left > 0 && n > 0 {
            exp[rng.gen_range(0..n)] += 1;
            left -= 1;
        }
        p = &p + &PolyExpr::monomial(n, exp, small(rng));
    }
    p
}

pub fn poly_map(rng: &mut ChaCha8Rng, n: usize, m: usize, max_degree: u32) -> SmoothMap {
    let comps = (0..m).map(|_| poly(rng, n, max_degree, 3)).collect();
    SmoothMap::polynomial_global(n, comps).expect("dimensions agree")
}

pub fn differential_form(rng: &mut ChaCha8Rng, n: usize, degree: usize, max_degree: u32) -> DifferentialForm {
    let mut coeffs: Vec<(Vec<usize>, PolyExpr)> = Vec::new();
    for k in MultiIndex::all(n, degree) {
        if rng.gen_bool(0.7) {
            coeffs.push((k.as_slice().to_vec(), poly(rng, n, max_degree, 3)));
        }
    }
    DifferentialForm::from_coeffs(BoxDomain::whole(n), degree, coeffs).expect("valid indices")
}
