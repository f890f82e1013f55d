//! Grids shipped with the repository.

use crate::grid::{parse_grid, Grid};

pub const UNKNOT: &str = include_str!("../../../fixtures/unknot2.grid");
/// 5x5 trefoil: X on the diagonal, O two columns to the right.
pub const TREFOIL: &str = include_str!("../../../fixtures/trefoil5.grid");
pub const FIGURE_EIGHT: &str = include_str!("../../../fixtures/figure8.grid");
pub const KNOT_5_2: &str = include_str!("../../../fixtures/knot5_2.grid");
/// 7x7 presentation of the (3,4) torus knot.
pub const TORUS_3_4: &str = include_str!("../../../fixtures/torus34.grid");
/// Connected sum of two trefoils of the same handedness, on an 8x8 grid.
pub const GRANNY: &str = include_str!("../../../fixtures/granny8.grid");

pub const ALL: [(&str, &str); 6] = [
    ("unknot", UNKNOT),
    ("trefoil", TREFOIL),
    ("figure-eight", FIGURE_EIGHT),
    ("5_2", KNOT_5_2),
    ("torus-3-4", TORUS_3_4),
    ("granny", GRANNY),
];

fn load(text: &str) -> Grid {
    parse_grid(text).expect("bundled fixture parses")
}

pub fn unknot() -> Grid {
    load(UNKNOT)
}

pub fn trefoil() -> Grid {
    load(TREFOIL)
}

pub fn figure_eight() -> Grid {
    load(FIGURE_EIGHT)
}

pub fn knot_5_2() -> Grid {
    load(KNOT_5_2)
}

pub fn torus_3_4() -> Grid {
    load(TORUS_3_4)
}

pub fn granny() -> Grid {
    load(GRANNY)
}

/// Looks a fixture up by name.
pub fn by_name(name: &str) -> Option<Grid> {
    ALL.iter().find(|(k, _)| *k == name).map(|(_, t)| load(t))
}

#[cfg(test)]
mod tests {
    #[test]
    fn all_parse_as_knots() {
        for (name, text) in super::ALL {
            let g = super::parse_grid(text).unwrap();
            assert!(g.is_knot(), "{name}");
        }
    }
}
