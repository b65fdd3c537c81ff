//! Small bundled datasets.

use std::path::Path;

use crate::io::parse_dataset;
use crate::model::EventDataset;

const WORKED_EXAMPLE: &str = include_str!("../data/worked_example.csv");

/// A four-type, 46-instance dataset on one spatial axis.
///
/// Four sites each hold an `A → B → C → D` chain: one A at `t = 1`, a group
/// of Bs at `t = 3`, Cs at `t = 12` and Ds at `t = 17`, so only consecutive
/// stages fall inside a `R = 10`, `T = 10` neighborhood. Four isolated
/// noise instances (c13..c15, d9) sit away from every site. The Bs around
/// `a1` are `b1..b4` with mean location 15.
pub fn worked_example() -> EventDataset {
    parse_dataset(WORKED_EXAMPLE.as_bytes(), Path::new("worked_example.csv"), None)
        .expect("bundled dataset parses")
}
