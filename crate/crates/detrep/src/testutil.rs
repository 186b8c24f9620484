//! Shared fixtures for unit tests.

use crate::polycore::{AffinePoly, HomoPoly, LinearForm, ONE, ZERO};
use crate::rng::SplitMix64;
use num_complex::Complex64 as C64;

pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// x(x + t1 y)(x + t2 y) - y z^2
pub fn weierstrass(t1: C64, t2: C64) -> HomoPoly {
    let x = LinearForm::new(ONE, ZERO, ZERO).to_poly();
    let f1 = LinearForm::new(ONE, t1, ZERO).to_poly();
    let f2 = LinearForm::new(ONE, t2, ZERO).to_poly();
    let mut yz2 = HomoPoly::zero(3);
    yz2.set(0, 1, ONE); // y z^2
    x.mul(&f1).mul(&f2).sub(&yz2)
}

/// x(x-y-z)(x+y+z)(x-2y-2z)(x+2y+2z) + y z^4 + y^2 z^3 + y^3 z^2
pub fn example_quintic() -> HomoPoly {
    let x = LinearForm::new(ONE, ZERO, ZERO).to_poly();
    let f = |a: f64| LinearForm::new(ONE, c(a), c(a)).to_poly();
    let prod = x.mul(&f(-1.0)).mul(&f(1.0)).mul(&f(-2.0)).mul(&f(2.0));
    let mut extra = HomoPoly::zero(5);
    extra.set(0, 1, ONE); // y z^4
    extra.set(0, 2, ONE); // y^2 z^3
    extra.set(0, 3, ONE); // y^3 z^2
    prod.add(&extra)
}

/// Random homogeneous polynomial with complex coefficients on the unit square.
pub fn random_homo(degree: usize, rng: &mut SplitMix64) -> HomoPoly {
    let mut p = HomoPoly::zero(degree);
    for i in 0..=degree {
        for j in 0..=degree - i {
            p.set(i, j, rng.next_complex());
        }
    }
    p
}

/// Random homogeneous polynomial with real coefficients on (-1, 1).
pub fn random_homo_real(degree: usize, rng: &mut SplitMix64) -> HomoPoly {
    let mut p = HomoPoly::zero(degree);
    for i in 0..=degree {
        for j in 0..=degree - i {
            p.set(i, j, c(rng.next_signed()));
        }
    }
    p
}

/// Random affine polynomial with complex coefficients.
pub fn random_affine(degree: usize, rng: &mut SplitMix64) -> AffinePoly {
    let mut p = AffinePoly::zero(degree);
    for i in 0..=degree {
        for j in 0..=degree - i {
            p.set(i, j, rng.next_complex());
        }
    }
    p
}

/// Product of `n` random linear forms (decomposable degree-n polynomial).
pub fn random_line_product(n: usize, rng: &mut SplitMix64) -> HomoPoly {
    let mut p = HomoPoly::constant(ONE);
    for _ in 0..n {
        let l = LinearForm::new(rng.next_complex(), rng.next_complex(), rng.next_complex());
        p = p.mul(&l.to_poly());
    }
    p
}
