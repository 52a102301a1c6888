//! Bimodal-unimodal distribution families: densities, moments, modes,
//! samplers, maximum-likelihood fitting and model comparison.
//!
//! Every routine is generic over [`Real`] (`f32` or `f64`); the `*F64`
//! aliases below fix the scalar for the common case.
//!
//! ```
//! use bimodal::{fit_config, fit_ml, BunF64, Dataset, DensityModel, Model, RngStream};
//!
//! # fn main() -> bimodal::Result<()> {
//! let d = BunF64::from_parts(0.0, 1.0, 2.0, 0.5)?;
//! let xs = d.sample(500, &mut RngStream::new(1));
//! let data = Dataset::from_values(xs)?;
//! let report = fit_ml(&data, Model::Bun, &fit_config(), &mut RngStream::new(2))?;
//! println!("AIC {:.2}, estimates {:?}", report.aic, report.estimates);
//! # Ok(())
//! # }
//! ```

pub mod error;
pub mod quadrature;
pub mod real;
pub mod roots;
pub mod special;
pub mod optimize;
pub mod rng;
pub mod density;
pub mod bun;
pub mod bust;
pub mod bul;
pub mod logbun;
pub mod constructors;
pub mod modes;
pub mod fit;

pub use bul::{Bul, BulParams};
pub use bun::{Bun, BunParams};
pub use bust::{Bust, BustParams};
pub use constructors::{ConstructedFamily, FoldTransform, SkewCdf, SymmetricBase, WeightFn};
pub use density::DensityModel;
pub use error::{Error, Result};
pub use fit::{compare, fit_config, fit_ml, Comparison, Dataset, FitReport, Model, ModelInstance};
pub use logbun::LogBun;
pub use optimize::OptimizerConfig;
pub use quadrature::Quadrature;
pub use real::Real;
pub use rng::RngStream;

pub type BunF64 = Bun<f64>;
pub type BunParamsF64 = BunParams<f64>;
pub type BustF64 = Bust<f64>;
pub type BustParamsF64 = BustParams<f64>;
pub type BulF64 = Bul<f64>;
pub type BulParamsF64 = BulParams<f64>;
pub type LogBunF64 = LogBun<f64>;
pub type ConstructedFamilyF64 = ConstructedFamily<f64>;
pub type SymmetricBaseF64 = SymmetricBase<f64>;
pub type DatasetF64 = Dataset<f64>;
pub type QuadratureF64 = Quadrature<f64>;
pub type OptimizerConfigF64 = OptimizerConfig<f64>;
