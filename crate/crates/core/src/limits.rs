use crate::error::{GridError, Result};

/// Resource ceilings checked before any factorial-size allocation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Largest grid number whose generators may be enumerated.
    pub max_grid: usize,
    /// Largest grid number for the sign-constraint solver.
    pub max_sign_grid: usize,
    /// Hard memory ceiling in MiB, if any.
    pub max_memory_mb: Option<u64>,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_grid: 9, max_sign_grid: 7, max_memory_mb: None }
    }
}

pub const MEMORY_ENV: &str = "GRIDHFK_MAX_MEMORY_MB";

impl Limits {
    /// Defaults, with the memory ceiling read from `GRIDHFK_MAX_MEMORY_MB`.
    pub fn from_env() -> Self {
        let max_memory_mb = std::env::var(MEMORY_ENV).ok().and_then(|v| v.trim().parse().ok());
        Limits { max_memory_mb, ..Limits::default() }
    }

    pub fn check_grid(&self, n: usize) -> Result<()> {
        if n > self.max_grid {
            return Err(GridError::ResourceLimit(format!(
                "grid number {n} exceeds the ceiling {} ({}! generators)",
                self.max_grid, n
            )));
        }
        Ok(())
    }

    pub fn check_sign_grid(&self, n: usize) -> Result<()> {
        if n > self.max_sign_grid {
            return Err(GridError::ResourceLimit(format!(
                "sign solving for grid number {n} exceeds the ceiling {}",
                self.max_sign_grid
            )));
        }
        Ok(())
    }

    /// Rejects a computation whose estimated footprint exceeds the ceiling.
    pub fn check_memory(&self, what: &str, bytes: u128) -> Result<()> {
        if let Some(mb) = self.max_memory_mb {
            let need = bytes / (1024 * 1024);
            if need > mb as u128 {
                return Err(GridError::ResourceLimit(format!(
                    "{what} needs about {need} MiB, above the {mb} MiB ceiling"
                )));
            }
        }
        Ok(())
    }
}

pub(crate) fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

/// Rough footprint of a chain complex with `basis` elements on an `n` grid.
pub(crate) fn complex_bytes(n: usize, basis: u128) -> u128 {
    let per = 64 + (n * n) as u128 * 6;
    basis * per
}
