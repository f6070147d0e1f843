//! Scalar abstraction: every numeric routine in this crate is generic over
//! a floating-point type.

use std::fmt;

use num_traits::{Float, FromPrimitive};

/// Floating-point scalar: `f32` or `f64`.
pub trait Scalar:
    Float + FromPrimitive + fmt::Debug + fmt::Display + Default + Send + Sync + 'static
{
}

impl<T> Scalar for T where
    T: Float + FromPrimitive + fmt::Debug + fmt::Display + Default + Send + Sync + 'static
{
}

/// Shorthand for lifting an `f64` constant (tolerances, literals) into `T`.
pub fn lit<T: Scalar>(x: f64) -> T {
    T::from_f64(x).expect("f64 constant representable in scalar type")
}

/// Strictly positive and not NaN.
pub(crate) fn is_positive<T: Scalar>(x: T) -> bool {
    x > T::zero()
}

/// splitmix64 of `(master ^ index)`: independent per-worker seed streams
/// that do not depend on execution order.
pub(crate) fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master ^ index.wrapping_mul(0xff51_afd7_ed55_8ccd);
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use crate::numerics::{laplacian_pinv, solve_linear, Matrix};

    /// The whole numeric layer is generic; spot-check the f32 instantiation.
    #[test]
    fn f32_instantiation_works() {
        let a = Matrix::<f32>::from_rows(&[vec![2.0, 1.0], vec![1.0, 3.0]]).unwrap();
        let x = solve_linear(&a, &[3.0f32, 5.0]).unwrap();
        assert!((x[0] - 0.8).abs() < 1e-5);
        assert!((x[1] - 1.4).abs() < 1e-5);

        let l = Matrix::<f32>::from_rows(&[vec![1.0, -1.0], vec![-1.0, 1.0]]).unwrap();
        let p = laplacian_pinv(&l).unwrap();
        assert!((p.get(0, 0) - 0.25).abs() < 1e-5);
        assert!((p.get(0, 1) + 0.25).abs() < 1e-5);
    }
}
