//! Data randomization: random models, the physical-space procedure and the
//! angular (good-frame) procedure.

pub mod angular;
pub mod model;
pub mod phys;

pub use angular::{
    bessel_j, build_good_frame, fb_analyze, fb_synthesize, randomize_angular, AngularOptions, AngularRandomizer,
    AngularReport, FourierBesselCoeffs, FrameCertificate, FrameOptions, GoodFrame,
};
pub use model::{sample_coefficients, stream_id, substream, Family, RandomModel, StreamTag};
pub use phys::{apply_weights, base_bump, randomize_physical, PartitionOfUnity};
