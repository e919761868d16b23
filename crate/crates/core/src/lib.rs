//! Two-hand fingertip, palm-centre and finger bend-angle estimation from
//! binary skin silhouettes.
//!
//! The pipeline runs per frame: [`skin::segment_skin`] produces a silhouette,
//! [`blob::select_hands`] keeps the two largest 8-connected regions ordered
//! left to right, [`fingertip::detect_fingertips`] and [`palm::find_cop`]
//! locate tips and the palm centre of each hand, and [`angle`] turns tip to
//! palm distances into bend angles against an open-hand reference frame.
//!
//! Coordinates are `(row, col)` with rows growing downward. Angles are in
//! degrees, counter-clockwise from the +col axis as seen on screen, so a finger
//! pointing up has direction 90°.

pub mod angle;
pub mod annotate;
pub mod bench;
pub mod blob;
pub mod config;
pub mod fingertip;
pub mod image;
pub mod io;
pub mod palm;
pub mod pipeline;
pub mod skin;
pub mod synth;

/// Width of the resolution that size defaults are quoted at.
pub const BASELINE_WIDTH: usize = 240;
/// Height of the resolution that size defaults are quoted at.
pub const BASELINE_HEIGHT: usize = 230;
