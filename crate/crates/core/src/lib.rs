//! Exact split decompositions of the standard module of a Q-polynomial
//! distance-regular graph, with checks of the identities they satisfy.
//!
//! ```
//! use splitdec::graphs::{build_family, DistanceData, IntersectionData};
//!
//! let g = build_family(&"cycle:8".parse().unwrap()).unwrap();
//! let dd = DistanceData::new(&g).unwrap();
//! let inter = IntersectionData::new(&dd).unwrap();
//! assert_eq!(inter.diameter(), 4);
//! ```

pub mod dump;
pub mod field;
pub mod gf;
pub mod graphs;
pub mod linalg;
pub mod modular;
pub mod qtet;
pub mod report;
pub mod scheme;
pub mod split;
pub mod subspace;
pub mod tmodules;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/field.md")]
    struct Field;
    #[doc = include_str!("../../../book/src/schemes.md")]
    struct Schemes;
    #[doc = include_str!("../../../book/src/split.md")]
    struct Split;
    #[doc = include_str!("../../../book/src/qtet.md")]
    struct QTet;
    #[doc = include_str!("../../../book/src/tmodules.md")]
    struct TModules;
}
