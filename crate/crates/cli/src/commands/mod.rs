pub mod filters;
pub mod generate;
pub mod profiles;
pub mod sweep;
pub mod verify;

pub use filters::cmd_filters;
pub use generate::cmd_generate;
pub use profiles::cmd_profiles;
pub use sweep::cmd_sweep;
pub use verify::cmd_verify;
