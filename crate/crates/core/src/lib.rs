//! Full-reference video quality metrics (a self-contained VMAF engine, SSIM,
//! PSNR), parametric contrast enhancement operators, and an NSGA-II search
//! for enhancement settings that move VMAF while SSIM stays put.

pub mod enhance;
pub mod error;
pub mod filter;
pub mod harness;
pub mod media;
pub mod metrics;
pub mod nsga2;
pub mod plane;
pub mod synthetic;
pub mod vmaf;

pub use error::{Error, ErrorKind, Result};
pub use media::{load_clip, save_clip, ChromaFormat, Clip, ContainerFormat, Frame, Rational, VideoMeta};
pub use plane::Plane;
