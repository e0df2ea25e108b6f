//! Linking numbers of disjoint closed oriented submanifolds from Gauss-type
//! integrals in Euclidean space, in round spheres and in hypersurfaces
//! visible from the origin, with an exact crossing-count oracle in `R^3`.
//!
//! ```
//! use linkint::integrator::QuadratureSpec;
//! use linkint::linking::linking_sphere;
//! use linkint::manifold::builtin_scene;
//!
//! let s = builtin_scene("hopf_great_circles", &[]).unwrap();
//! let r = linking_sphere(&s.k, &s.l, &QuadratureSpec::default().with_order(16)).unwrap();
//! assert_eq!(r.snapped, 1);
//! ```

pub mod checks;
pub mod cli;
pub mod integrator;
pub mod kernel;
pub mod linalg;
pub mod linking;
pub mod manifold;
pub mod oracle;
pub mod scene_file;
