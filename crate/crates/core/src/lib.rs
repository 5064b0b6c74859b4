//! Spherical area and length of maps into the Riemann sphere, the lens
//! ratio function `h` and its maximum `h₀`, isoperimetric bounds, geodesic
//! curve classification and numerical checks of area/length inequalities.

pub mod extremal;
pub mod isoperimetric;
pub mod lens;
pub mod polycurve;
pub mod quadrature;
pub mod sphere;
pub mod verify;

pub use extremal::{ExtremalFamily, LensOptimum};
pub use isoperimetric::EnclosingCap;
pub use lens::{find_h0, h, zeta0, zeta1, H0Result, LensDomain};
pub use polycurve::GeodesicPolygon;
pub use quadrature::{AnalyticMap, ParamCurve, QuadratureResult};
pub use sphere::{ExtComplex, ExtPoint, GeodesicArc, Rotation, SphericalCircle};
pub use verify::{InequalityReport, Verdict};
