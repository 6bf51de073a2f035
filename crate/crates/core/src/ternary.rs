//! Representation numbers of positive definite ternary forms and the
//! rank-zero test built from four of them.

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::arith::modular::isqrt_i128;
use crate::{Error, Result};

/// `a x^2 + b y^2 + c z^2 + d yz + e xz + f xy`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TernaryForm {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
    pub e: i64,
    pub f: i64,
}

/// `x^2 + 12y^2 + 15z^2 + 12yz`
pub const E0_FIRST: TernaryForm = TernaryForm { a: 1, b: 12, c: 15, d: 12, e: 0, f: 0 };
/// `3x^2 + 4y^2 + 13z^2 + 4yz`
pub const E0_SECOND: TernaryForm = TernaryForm { a: 3, b: 4, c: 13, d: 4, e: 0, f: 0 };
/// `3x^2 + 9y^2 + 16z^2`
pub const E2_FIRST: TernaryForm = TernaryForm { a: 3, b: 9, c: 16, d: 0, e: 0, f: 0 };
/// `x^2 + 3y^2 + 144z^2`
pub const E2_SECOND: TernaryForm = TernaryForm { a: 1, b: 3, c: 144, d: 0, e: 0, f: 0 };

/// Largest total number of inner iterations [`representation_count`] accepts.
pub const WORK_LIMIT: u128 = 1 << 36;

impl TernaryForm {
    pub fn new(a: i64, b: i64, c: i64, d: i64, e: i64, f: i64) -> Result<Self> {
        let form = TernaryForm { a, b, c, d, e, f };
        if !form.is_positive_definite() {
            return Err(Error::InvalidArgument(format!("{form:?} is not positive definite")));
        }
        Ok(form)
    }

    /// Twice the Gram matrix, which is integral.
    pub fn matrix(&self) -> [[i128; 3]; 3] {
        let (a, b, c, d, e, f) = (self.a, self.b, self.c, self.d, self.e, self.f);
        [[2 * a, f, e], [f, 2 * b, d], [e, d, 2 * c]].map(|row| row.map(i128::from))
    }

    fn from_matrix(m: &[[i128; 3]; 3]) -> Self {
        let n = |v: i128| v as i64;
        TernaryForm { a: n(m[0][0] / 2), b: n(m[1][1] / 2), c: n(m[2][2] / 2), d: n(m[1][2]), e: n(m[0][2]), f: n(m[0][1]) }
    }

    pub fn is_positive_definite(&self) -> bool {
        let m = self.matrix();
        m[0][0] > 0 && m[0][0] * m[1][1] - m[0][1] * m[0][1] > 0 && det3(&m) > 0
    }

    pub fn eval(&self, x: i64, y: i64, z: i64) -> i128 {
        let (x, y, z) = (x as i128, y as i128, z as i128);
        let (a, b, c, d, e, f) = (self.a as i128, self.b as i128, self.c as i128, self.d as i128, self.e as i128, self.f as i128);
        a * x * x + b * y * y + c * z * z + d * y * z + e * x * z + f * x * y
    }

    /// Exact bounds `|v_i| <= B_i` on solutions of `Q(v) = n`, from
    /// `v_i^2 <= n * (G^-1)_ii`.
    pub fn coordinate_bounds(&self, n: u64) -> [i64; 3] {
        let m = self.matrix();
        let det = det3(&m);
        let mut out = [0i64; 3];
        for (i, slot) in out.iter_mut().enumerate() {
            let (j, k) = ((i + 1) % 3, (i + 2) % 3);
            let cof = m[j][j] * m[k][k] - m[j][k] * m[j][k];
            let bound = Ratio::new(2 * n as i128 * cof, det).floor().to_integer();
            *slot = isqrt_i128(bound) as i64;
        }
        out
    }
}

fn det3(m: &[[i128; 3]; 3]) -> i128 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Number of integer `(x, y, z)` with `Q(x, y, z) = n`.
pub fn representation_count(form: &TernaryForm, n: u64) -> Result<u64> {
    count_scaled(form, n, 1)
}

/// Count with every coordinate bound multiplied by `scale`.
pub(crate) fn count_scaled(form: &TernaryForm, n: u64, scale: i64) -> Result<u64> {
    if !form.is_positive_definite() {
        return Err(Error::InvalidArgument(format!("{form:?} is not positive definite")));
    }
    if n == 0 {
        return Ok(1);
    }
    let bounds = form.coordinate_bounds(n).map(|b| b.saturating_mul(scale));
    // solve for the variable with the widest range
    let solve = (0..3).max_by_key(|&i| bounds[i]).unwrap();
    let order: [usize; 3] = match solve {
        0 => [1, 2, 0],
        1 => [0, 2, 1],
        _ => [0, 1, 2],
    };
    let work = (2 * bounds[order[0]] as u128 + 1) * (2 * bounds[order[1]] as u128 + 1);
    if work > WORK_LIMIT {
        return Err(Error::BoundExceeded { p: n, bound: WORK_LIMIT as u64 });
    }
    let m = form.matrix();
    let mut pm = [[0i128; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            pm[i][j] = m[order[i]][order[j]];
        }
    }
    let g = TernaryForm::from_matrix(&pm);
    let (a, b, c, d, e, f) = (g.a as i128, g.b as i128, g.c as i128, g.d as i128, g.e as i128, g.f as i128);
    let (bx, by) = (bounds[order[0]] as i128, bounds[order[1]] as i128);
    let target = n as i128;
    let mut count = 0u64;
    for x in -bx..=bx {
        for y in -by..=by {
            // c z^2 + (d y + e x) z + (a x^2 + b y^2 + f x y - n) = 0
            let lin = d * y + e * x;
            let cst = a * x * x + b * y * y + f * x * y - target;
            let disc = lin * lin - 4 * c * cst;
            if disc < 0 {
                continue;
            }
            let s = isqrt_i128(disc);
            if s * s != disc {
                continue;
            }
            for root in [-lin + s, -lin - s] {
                if root % (2 * c) == 0 {
                    count += 1;
                }
                if s == 0 {
                    break;
                }
            }
        }
    }
    Ok(count)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankZeroCertificate {
    /// `r(D, x^2+12y^2+15z^2+12yz) - r(D, 3x^2+4y^2+13z^2+4yz)`
    pub e0_diff: i64,
    /// `r(D, 3x^2+9y^2+16z^2) - r(D, x^2+3y^2+144z^2)`
    pub e2_diff: i64,
    /// A nonzero difference rules out five squares in progression over `Q(sqrt D)`.
    pub excludes: bool,
}

/// Both differences for `D`. Fails only when `D` is too large to enumerate.
pub fn rank_zero_certificate(d: u64) -> Result<RankZeroCertificate> {
    let r = |form: &TernaryForm| representation_count(form, d).map(|v| v as i64);
    let e0_diff = r(&E0_FIRST)? - r(&E0_SECOND)?;
    let e2_diff = r(&E2_FIRST)? - r(&E2_SECOND)?;
    Ok(RankZeroCertificate { e0_diff, e2_diff, excludes: e0_diff != 0 || e2_diff != 0 })
}
