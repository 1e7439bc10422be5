//! Built-in dice sets.

use crate::dice::{DiceSet, Die};

/// Name of the five-dice set whose first five roll counts realize an `S_4`
/// set of tournaments.
pub const FIVE_DICE: &str = "five-dice";

/// `{10,10,10}, {0,0,30}, {7,7,19}, {9,9,14}, {3,3,26}` labelled `A` to `E`.
/// Die `r - 1` beats every other die when each is rolled `r` times.
pub fn five_dice() -> DiceSet {
    let faces: [[i64; 3]; 5] = [[10, 10, 10], [0, 0, 30], [7, 7, 19], [9, 9, 14], [3, 3, 26]];
    let dice =
        faces.iter().zip(["A", "B", "C", "D", "E"]).map(|(f, l)| Die::new(l, f.to_vec()).expect("nonempty")).collect();
    DiceSet::new(FIVE_DICE, dice).expect("distinct labels")
}

/// Every built-in set.
pub fn builtin() -> Vec<DiceSet> {
    vec![five_dice()]
}
