//! Semidefinite programs: a primal-dual interior point solver, exact
//! rational checks, and the flag and symmetric-polynomial formulations.

pub mod certificate;
pub mod exact;
pub mod flag;
pub mod gp;
pub mod program;
pub mod solver;

pub use certificate::{Certificate, CertificateBlock, CertificateKind, GpMode, Setup};
pub use exact::{check_psd_rational, ldl_psd, RatMatrix};
pub use flag::{assemble_flag_sdp, assemble_flag_sdp_multi, round_flag_solution, FlagSdpInstance};
pub use gp::{assemble_gp_sdp, assemble_gp_sdp_with, flag_sos_target, round_gp_solution, GpSdpInstance};
pub use program::{BoundProgram, ProgramSolution};
pub use solver::{solve, SdpProblem, SdpSolution, SolverOptions};
