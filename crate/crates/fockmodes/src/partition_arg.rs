//! Partition syntax `0,1|2,3`: side A before the bar, side B after it.

use fockmodes_core::entanglement::Partition;
use fockmodes_core::Error as CoreError;

pub fn parse_partition(text: &str, mode_count: usize) -> Result<Partition, CoreError> {
    let (a, b) = text
        .split_once('|')
        .ok_or_else(|| CoreError::Partition(format!("'{text}' has no '|' separator")))?;
    Partition::new(parse_side(a)?, parse_side(b)?, mode_count)
}

fn parse_side(text: &str) -> Result<Vec<usize>, CoreError> {
    text.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<usize>()
                .map_err(|_| CoreError::Partition(format!("'{t}' is not a mode index")))
        })
        .collect()
}

pub fn format_partition(p: &Partition) -> String {
    let side = |s: &[usize]| s.iter().map(usize::to_string).collect::<Vec<_>>().join(",");
    format!("{}|{}", side(p.side_a()), side(p.side_b()))
}
