//! Unitaries from `d^2 - d` angles: a product of Givens rotations with
//! phases over the pairs `(p, q)`, `p < q`, in lexicographic order. Column
//! phases are left out since they do not change the projectors.

use std::f64::consts::PI;

use crate::qcore::linalg::{CMatrix, C64};

/// Number of angles for a basis of `C^d`.
pub fn parameter_count(d: usize) -> usize {
    d * d - d
}

/// Maps an angle into `[-pi, pi)`.
pub fn wrap_angle(x: f64) -> f64 {
    let y = (x + PI).rem_euclid(2.0 * PI) - PI;
    if y >= PI {
        -PI
    } else {
        y
    }
}

/// `U = G_(0,1) G_(0,2) ... G_(d-2,d-1)` with
/// `G = [[cos t, -e^{-i phi} sin t], [e^{i phi} sin t, cos t]]` on rows `p, q`.
/// `params = [t_01, phi_01, t_02, phi_02, ...]`; zero angles give the identity.
pub fn givens_unitary(d: usize, params: &[f64]) -> CMatrix {
    assert_eq!(params.len(), parameter_count(d), "angle count for dimension {d}");
    let mut u = CMatrix::identity(d, d);
    let mut k = 0;
    for p in 0..d {
        for q in p + 1..d {
            let (t, phi) = (params[k], params[k + 1]);
            k += 2;
            let (s, c) = t.sin_cos();
            let e = C64::from_polar(1.0, phi);
            // u <- u * G, touching columns p and q only.
            for r in 0..d {
                let (a, b) = (u[(r, p)], u[(r, q)]);
                u[(r, p)] = a * c + b * e * s;
                u[(r, q)] = -a * e.conj() * s + b * c;
            }
        }
    }
    u
}
