//! Capacity catalog: VC dimensions of the supported model classes and the
//! polynomial growth-function bound.

use alloc::string::ToString;

use crate::{Error, Result};

#[cfg(not(feature = "std"))]
use num_traits::Float;

/// Descriptors for the model classes with known capacity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelClass {
    /// Intercept-only prediction with the global mean (an autoregression
    /// with zero lags).
    Mean,
    /// Scalar autoregression with d lags.
    Ar { d: u32 },
    /// Vector autoregression: k series, d lags.
    Var { k: u32, d: u32 },
    /// Linear regression on p inputs.
    Linear { p: u32 },
    /// State-space predictor truncated to memory d over a p-dimensional
    /// observation, capacity taken from its VAR(p, d) truncation; an
    /// optional cap can tighten the catalog value.
    StateSpaceTruncated { d: u32, p: u32, cap: Option<u32> },
    /// The sine-frequency class: one parameter, unbounded capacity.
    SineFrequency,
}

/// A finite VC dimension or the explicit absence of one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VcDim {
    Finite(u32),
    Infinite,
}

impl VcDim {
    /// The finite value, or an error when no finite bound exists.
    pub fn finite(self) -> Result<u32> {
        match self {
            VcDim::Finite(v) => Ok(v),
            VcDim::Infinite => Err(Error::InfiniteCapacity),
        }
    }
}

/// Catalog lookup.
pub fn vc_dimension(class: ModelClass) -> VcDim {
    match class {
        ModelClass::Mean => VcDim::Finite(1),
        ModelClass::Ar { d } => VcDim::Finite(d + 1),
        ModelClass::Var { k, d } => VcDim::Finite(k * d + 1),
        ModelClass::Linear { p } => VcDim::Finite(p + 1),
        ModelClass::StateSpaceTruncated { d, p, cap } => {
            let catalog = p * d + 1;
            VcDim::Finite(match cap {
                Some(c) => c.min(catalog),
                None => catalog,
            })
        }
        ModelClass::SineFrequency => VcDim::Infinite,
    }
}

/// Growth-function bound (n+1)^vcd, with the exact value 2^n reported in
/// the shattering regime n <= vcd.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthBound {
    pub bound: f64,
    pub exact: Option<f64>,
}

pub fn growth_function_bound(n: usize, vcd: VcDim) -> Result<GrowthBound> {
    let vcd = vcd.finite()?;
    if vcd == 0 {
        return Err(Error::InvalidInput("vcd must be >= 1".to_string()));
    }
    let bound = ((n as f64) + 1.0).powi(vcd as i32);
    let exact = if n <= vcd as usize {
        Some(2.0f64.powi(n as i32))
    } else {
        None
    };
    Ok(GrowthBound { bound, exact })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_closed_forms() {
        assert_eq!(vc_dimension(ModelClass::Ar { d: 2 }), VcDim::Finite(3));
        assert_eq!(vc_dimension(ModelClass::Var { k: 4, d: 1 }), VcDim::Finite(5));
        assert_eq!(vc_dimension(ModelClass::Mean), VcDim::Finite(1));
        assert_eq!(vc_dimension(ModelClass::SineFrequency), VcDim::Infinite);
        for p in 1..=20 {
            assert_eq!(vc_dimension(ModelClass::Linear { p }), VcDim::Finite(p + 1));
        }
        for d in 1..=6 {
            for k in 1..=6 {
                assert_eq!(
                    vc_dimension(ModelClass::Var { k, d }),
                    VcDim::Finite(k * d + 1)
                );
                // the truncated state-space class inherits the VAR value
                assert_eq!(
                    vc_dimension(ModelClass::StateSpaceTruncated { d, p: k, cap: None }),
                    VcDim::Finite(k * d + 1)
                );
            }
        }
    }

    #[test]
    fn cap_only_tightens() {
        let c = ModelClass::StateSpaceTruncated { d: 2, p: 1, cap: Some(2) };
        assert_eq!(vc_dimension(c), VcDim::Finite(2));
        let loose = ModelClass::StateSpaceTruncated { d: 2, p: 1, cap: Some(99) };
        assert_eq!(vc_dimension(loose), VcDim::Finite(3));
    }

    #[test]
    fn infinite_capacity_is_an_error_not_a_sentinel() {
        assert!(matches!(
            vc_dimension(ModelClass::SineFrequency).finite(),
            Err(Error::InfiniteCapacity)
        ));
        assert!(growth_function_bound(5, VcDim::Infinite).is_err());
    }

    #[test]
    fn growth_bound_values() {
        let g = growth_function_bound(0, VcDim::Finite(5)).unwrap();
        assert_eq!(g.bound, 1.0);
        assert_eq!(g.exact, Some(1.0));
        let g = growth_function_bound(3, VcDim::Finite(1)).unwrap();
        assert_eq!(g.bound, 4.0);
        assert_eq!(g.exact, None);
        let g = growth_function_bound(2, VcDim::Finite(5)).unwrap();
        assert_eq!(g.bound, 243.0);
        assert_eq!(g.exact, Some(4.0));
    }

    #[test]
    fn growth_bound_monotone_in_both_arguments() {
        let mut prev = 0.0;
        for n in 0..50 {
            let g = growth_function_bound(n, VcDim::Finite(3)).unwrap();
            assert!(g.bound >= prev);
            prev = g.bound;
        }
        let mut prev = 0.0;
        for v in 1..30 {
            let g = growth_function_bound(10, VcDim::Finite(v)).unwrap();
            assert!(g.bound >= prev);
            prev = g.bound;
        }
    }
}
