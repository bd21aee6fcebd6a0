//! Complex-plane set machinery: interval disks, hyperbolic convex hulls,
//! inversion and region-to-disk distances.

mod disk;
mod oracle;
mod region;

pub use disk::{disk_from_interval, scaled_negated_disk, IntervalDisk};
pub use oracle::brute_force_dist;
pub use region::{
    contains, dist_region_disk, hco, invert_region, Geodesic, HyperbolicRegion, Vertex,
    GEOMETRY_TOL,
};
