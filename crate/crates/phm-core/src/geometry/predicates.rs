//! Sign-exact orientation and circumcircle predicates.
//!
//! Each predicate first evaluates its determinant in f64 and compares the
//! magnitude against a forward error bound on that floating-point
//! evaluation; when the bound cannot certify the sign, the determinant is
//! recomputed in arbitrary-precision rationals, which is exact for every
//! finite f64 input. Only the sign is ever returned.

use num_rational::BigRational;
use num_traits::Zero;

/// Unit roundoff of f64 (half a ulp of 1.0).
const EPS: f64 = f64::EPSILON / 2.0;
/// Error coefficient for the orientation determinant.
const CCW_ERRBOUND: f64 = (3.0 + 16.0 * EPS) * EPS;
/// Error coefficient for the circumcircle determinant.
const ICC_ERRBOUND: f64 = (10.0 + 96.0 * EPS) * EPS;

/// Sign of the signed area of triangle (a, b, c): +1 if counterclockwise,
/// -1 if clockwise, 0 if collinear.
pub fn orient2d(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> i8 {
    let detleft = (a[0] - c[0]) * (b[1] - c[1]);
    let detright = (a[1] - c[1]) * (b[0] - c[0]);
    let det = detleft - detright;

    let detsum = if detleft > 0.0 {
        if detright <= 0.0 {
            return sign_f64(det);
        }
        detleft + detright
    } else if detleft < 0.0 {
        if detright >= 0.0 {
            return sign_f64(det);
        }
        -detleft - detright
    } else {
        // detleft is zero, so det == -detright exactly.
        return sign_f64(det);
    };

    let errbound = CCW_ERRBOUND * detsum;
    if det >= errbound || -det >= errbound {
        sign_f64(det)
    } else {
        orient2d_exact(a, b, c)
    }
}

/// Sign of the circumcircle test: with (a, b, c) counterclockwise, +1 means
/// d lies strictly inside the circle through a, b, c; -1 strictly outside;
/// 0 on the circle. Clockwise (a, b, c) flips the sign.
pub fn in_circle(a: [f64; 2], b: [f64; 2], c: [f64; 2], d: [f64; 2]) -> i8 {
    let adx = a[0] - d[0];
    let ady = a[1] - d[1];
    let bdx = b[0] - d[0];
    let bdy = b[1] - d[1];
    let cdx = c[0] - d[0];
    let cdy = c[1] - d[1];

    let bdxcdy = bdx * cdy;
    let cdxbdy = cdx * bdy;
    let alift = adx * adx + ady * ady;

    let cdxady = cdx * ady;
    let adxcdy = adx * cdy;
    let blift = bdx * bdx + bdy * bdy;

    let adxbdy = adx * bdy;
    let bdxady = bdx * ady;
    let clift = cdx * cdx + cdy * cdy;

    let det = alift * (bdxcdy - cdxbdy) + blift * (cdxady - adxcdy) + clift * (adxbdy - bdxady);

    let permanent = (bdxcdy.abs() + cdxbdy.abs()) * alift
        + (cdxady.abs() + adxcdy.abs()) * blift
        + (adxbdy.abs() + bdxady.abs()) * clift;
    let errbound = ICC_ERRBOUND * permanent;
    if det > errbound || -det > errbound {
        sign_f64(det)
    } else {
        in_circle_exact(a, b, c, d)
    }
}

fn sign_f64(x: f64) -> i8 {
    if x > 0.0 {
        1
    } else if x < 0.0 {
        -1
    } else {
        0
    }
}

fn rat(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite coordinate")
}

fn sign_rat(x: &BigRational) -> i8 {
    if x.is_zero() {
        0
    } else if x > &BigRational::zero() {
        1
    } else {
        -1
    }
}

fn orient2d_exact(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> i8 {
    let ax = rat(a[0]) - rat(c[0]);
    let ay = rat(a[1]) - rat(c[1]);
    let bx = rat(b[0]) - rat(c[0]);
    let by = rat(b[1]) - rat(c[1]);
    let det = ax * by - ay * bx;
    sign_rat(&det)
}

fn in_circle_exact(a: [f64; 2], b: [f64; 2], c: [f64; 2], d: [f64; 2]) -> i8 {
    let adx = rat(a[0]) - rat(d[0]);
    let ady = rat(a[1]) - rat(d[1]);
    let bdx = rat(b[0]) - rat(d[0]);
    let bdy = rat(b[1]) - rat(d[1]);
    let cdx = rat(c[0]) - rat(d[0]);
    let cdy = rat(c[1]) - rat(d[1]);

    let alift = adx.clone() * adx.clone() + ady.clone() * ady.clone();
    let blift = bdx.clone() * bdx.clone() + bdy.clone() * bdy.clone();
    let clift = cdx.clone() * cdx.clone() + cdy.clone() * cdy.clone();

    let det = alift * (bdx.clone() * cdy.clone() - cdx.clone() * bdy.clone())
        + blift * (cdx * ady.clone() - adx.clone() * cdy)
        + clift * (adx * bdy - bdx * ady);
    sign_rat(&det)
}
