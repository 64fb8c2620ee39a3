//! Phase-space simulation of continuous-variable teleportation through a
//! two-mode squeezed channel that decoheres in a thermal environment.
//!
//! States are single-mode quasiprobabilities sampled on square grids
//! ([`WignerGrid`]) or known analytically ([`InputState`]). The channel is a
//! symmetric two-mode Gaussian ([`GaussianTwoMode`]) parameterized by
//! squeezing, thermal occupation and renormalized time ([`ChannelParams`]).

pub mod channel;
pub mod error;
pub mod fidelity;
pub mod nonclassicality;
pub mod numerics;
pub mod phase_space;
pub mod separability;
pub mod states;
pub mod teleport;
pub mod verify;

pub use channel::{
    direct_noise, evolve_channel, is_separable, noise_factor, teleport_vs_direct_gap, ChannelParams, NoiseFactor,
    NoiseKind,
};
pub use error::{Error, Result};
pub use fidelity::{fock_fidelity, overlap_fidelity, squeezed_fidelity, FidelityMethod, FidelityReport};
pub use nonclassicality::{
    moments, p_positive_after_teleport, photon_stats, quadrature_stats, quadrature_transfer, squeezing_threshold,
    sub_poisson_threshold, teleported_photon_stats, PhotonSource, PhotonStats, QuadratureStats,
};
pub use phase_space::{convert_sigma, Characteristic, GaussianOneMode, GridSpec, WignerGrid};
pub use separability::{
    channel_is_separable_via_appendix, check_criterion, decompose, direct_p, p_exponent_from_channel, reconstruct_p,
    AppendixVerdict, PExponentMatrix, SeparableDecomposition,
};
pub use states::{two_mode_squeezed_vacuum, GaussianTwoMode, InputState};
pub use teleport::{
    measurement_density, protocol_oracle, teleport_state, teleported_fock_wigner, teleported_squeezed_wigner,
    TeleportKernel,
};
