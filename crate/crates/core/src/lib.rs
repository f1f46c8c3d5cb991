//! Shape-following subdivision of 2D regions of interest.
//!
//! A binary mask is reduced to its centerline (exact distance map, two fast
//! marching waves, gradient descent on the second wave's arrival times). The
//! region is then cut perpendicular to the centerline at evenly spaced
//! points, the pieces are labeled in centerline order, and their areas are
//! equalized by exchanging border voxels between neighbors.
//!
//! ```
//! use sroi::{BinaryMask, GridDims};
//!
//! let mask = BinaryMask::from_fn(GridDims::new(64, 16).unwrap(), |_| true);
//! let labels = sroi::subdivide_equal(&mask, 4).unwrap();
//! assert_eq!(labels.areas(), vec![0, 256, 256, 256, 256]);
//! ```

pub mod centerline;
pub mod distance;
pub mod eikonal;
pub mod error;
pub mod grid;
pub mod io;
pub mod subdivision;

pub use centerline::{extract_centerline, extract_centerline_with, Centerline, CenterlineConfig};
pub use distance::euclidean_distance_map;
pub use eikonal::{argmax_field, descend, fast_march, ArrivalField, Path};
pub use error::{Error, ErrorKind, Result};
pub use grid::{
    connected_components, neighbors, BinaryMask, Connectivity, Coord, GridDims, LabelMap,
    ScalarField,
};
pub use subdivision::{
    balance_areas, cut_band, normal_at, run_pipeline, sample_cut_points, subdivide,
    subdivide_equal, subdivide_with_cuts, Cut, CutPlan, Subdivision, SubdivisionConfig, Vector2,
};
