//! Test-time adaptation of a small BEV 3D detector through a bank of
//! historical checkpoints.
//!
//! For every incoming batch of point-cloud scenes, the checkpoints in the
//! bank are compared pairwise — feature maps through the rank of their
//! stacked activation matrix, box predictions through Hungarian-matched
//! set costs. The resulting similarity matrix is inverted against the
//! all-ones target to produce per-checkpoint synergy weights, the weighted
//! parameter average forms a per-batch "super model" that pseudo-labels the
//! batch, and the live model takes a single training step on those labels.
//! Every `L` batches the checkpoint with the lowest mean weight is evicted
//! in favour of a snapshot of the live model.
//!
//! The crate is generic over the floating-point scalar. The shipped
//! pipeline instantiates detector parameters, scenes and checkpoint files
//! with [`ParamReal`] (`f32`, matching the on-disk checkpoint format) and
//! all similarity / weighting / evaluation math with [`SimReal`] (`f64`).

pub mod scalar;

pub mod boxsim;
pub mod featsim;
pub mod numkernel;
pub mod oracle;

/// Scalar for detector parameters, scene points and checkpoint files.
pub type ParamReal = f32;
/// Scalar for similarity, synergy-weight and evaluation math.
pub type SimReal = f64;

/// Dense matrix at evaluation precision.
pub type Mat = numkernel::DenseMatrix<SimReal>;
/// Oriented box at evaluation precision.
pub type Box3 = boxsim::Box3D<SimReal>;
/// Box set at evaluation precision.
pub type Boxes = boxsim::BoxSet<SimReal>;
/// Feature map at evaluation precision.
pub type Feat = featsim::FeatureMap<SimReal>;
