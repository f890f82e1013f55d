//! End-to-end helpers: grid in, bigraded homology out.

use crate::complex::{boundary_minus_truncated, boundary_tilde, BoundaryMatrix, Coefficients};
use crate::error::Result;
use crate::generators::{enumerate_generators, GeneratorSet};
use crate::grid::Grid;
use crate::homology::{extract_hat, homology, BigradedRanks};
use crate::limits::Limits;
use crate::par::Execution;
use crate::signs::solve_signs;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Options {
    pub coefficients: Coefficients,
    pub limits: Limits,
    pub execution: Execution,
}

impl Options {
    pub fn new(coefficients: Coefficients) -> Self {
        Options { coefficients, ..Options::default() }
    }

    pub fn with_execution(self, execution: Execution) -> Self {
        Options { execution, ..self }
    }

    pub fn with_limits(self, limits: Limits) -> Self {
        Options { limits, ..self }
    }
}

fn knot_check(g: &Grid) -> Result<()> {
    let components = g.link_components();
    if components != 1 {
        return Err(crate::GridError::NonIntegralAlexander { components });
    }
    Ok(())
}

/// Generators and tilde boundary, with signs solved when integers are asked for.
pub fn tilde_complex(g: &Grid, opts: &Options) -> Result<(GeneratorSet, BoundaryMatrix)> {
    knot_check(g)?;
    let gens = enumerate_generators(g, &opts.limits, opts.execution)?;
    let signs = match opts.coefficients {
        Coefficients::Z => Some(solve_signs(g, &opts.limits, opts.execution)?),
        Coefficients::F2 => None,
    };
    let b = boundary_tilde(g, &gens, opts.coefficients, signs.as_deref(), opts.execution)?;
    Ok((gens, b))
}

pub fn tilde_homology(g: &Grid, opts: &Options) -> Result<BigradedRanks> {
    let (_, b) = tilde_complex(g, opts)?;
    homology(&b, opts.coefficients, opts.execution)
}

/// HFK-hat bigraded ranks.
pub fn hat_homology(g: &Grid, opts: &Options) -> Result<BigradedRanks> {
    extract_hat(&tilde_homology(g, opts)?, g.n())
}

pub fn minus_complex(g: &Grid, d: u32, opts: &Options) -> Result<(GeneratorSet, BoundaryMatrix)> {
    knot_check(g)?;
    let gens = enumerate_generators(g, &opts.limits, opts.execution)?;
    let signs = match opts.coefficients {
        Coefficients::Z => Some(solve_signs(g, &opts.limits, opts.execution)?),
        Coefficients::F2 => None,
    };
    let b = boundary_minus_truncated(g, &gens, d, opts.coefficients, signs.as_deref(), &opts.limits, opts.execution)?;
    Ok((gens, b))
}

/// Homology of the minus complex modulo `U_i^d`. Bigradings with
/// `M > -2(d - 1)` agree with the untruncated complex.
pub fn minus_homology(g: &Grid, d: u32, opts: &Options) -> Result<BigradedRanks> {
    let (_, b) = minus_complex(g, d, opts)?;
    homology(&b, opts.coefficients, opts.execution)
}
