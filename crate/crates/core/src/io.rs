//! JSON file formats, DOT export and table rendering.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bounds::BoundsTable;
use crate::dice::{DiceError, DiceSet, Die};
use crate::tournament::{Tournament, TournamentError, TournamentSet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IoError {
    #[error("malformed JSON: {0}")]
    Json(String),
    #[error(transparent)]
    Tournament(#[from] TournamentError),
    #[error(transparent)]
    Dice(#[from] DiceError),
}

impl From<serde_json::Error> for IoError {
    fn from(e: serde_json::Error) -> Self {
        IoError::Json(e.to_string())
    }
}

/// On-disk form of a tournament set: 0-based vertices, one `[winner, loser]`
/// pair per unordered pair.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TournamentSetFile {
    pub n: usize,
    pub tournaments: Vec<TournamentEdges>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TournamentEdges {
    pub edges: Vec<[usize; 2]>,
}

impl From<&TournamentSet> for TournamentSetFile {
    fn from(set: &TournamentSet) -> Self {
        TournamentSetFile {
            n: set.order(),
            tournaments: set
                .members()
                .iter()
                .map(|t| TournamentEdges { edges: t.edges().into_iter().map(|(i, j)| [i, j]).collect() })
                .collect(),
        }
    }
}

impl TryFrom<TournamentSetFile> for TournamentSet {
    type Error = TournamentError;

    fn try_from(file: TournamentSetFile) -> Result<Self, Self::Error> {
        let members = file
            .tournaments
            .iter()
            .map(|t| {
                let pairs: Vec<(usize, usize)> = t.edges.iter().map(|&[i, j]| (i, j)).collect();
                Tournament::new(file.n, &pairs)
            })
            .collect::<Result<Vec<_>, _>>()?;
        TournamentSet::new(members)
    }
}

pub fn parse_tournament_set(text: &str) -> Result<TournamentSet, IoError> {
    let file: TournamentSetFile = serde_json::from_str(text)?;
    Ok(file.try_into()?)
}

/// Canonical compact JSON: edges sorted, no whitespace, trailing newline.
pub fn write_tournament_set(set: &TournamentSet) -> String {
    let mut s = serde_json::to_string(&TournamentSetFile::from(set)).expect("plain data");
    s.push('\n');
    s
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiceSetFile {
    pub name: String,
    pub dice: Vec<DieEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DieEntry {
    pub label: String,
    pub faces: Vec<i64>,
}

impl From<&DiceSet> for DiceSetFile {
    fn from(ds: &DiceSet) -> Self {
        DiceSetFile {
            name: ds.name().to_string(),
            dice: ds
                .dice()
                .iter()
                .map(|d| DieEntry { label: d.label().to_string(), faces: d.faces().to_vec() })
                .collect(),
        }
    }
}

impl TryFrom<DiceSetFile> for DiceSet {
    type Error = DiceError;

    fn try_from(file: DiceSetFile) -> Result<Self, Self::Error> {
        let dice = file.dice.into_iter().map(|d| Die::new(d.label, d.faces)).collect::<Result<Vec<_>, _>>()?;
        DiceSet::new(file.name, dice)
    }
}

pub fn parse_dice_set(text: &str) -> Result<DiceSet, IoError> {
    let file: DiceSetFile = serde_json::from_str(text)?;
    Ok(file.try_into()?)
}

/// Canonical compact JSON with faces sorted ascending.
pub fn write_dice_set(ds: &DiceSet) -> String {
    let mut s = serde_json::to_string(&DiceSetFile::from(ds)).expect("plain data");
    s.push('\n');
    s
}

/// One `digraph` block per member, nodes in index order, edges sorted.
pub fn export_dot(set: &TournamentSet) -> String {
    let mut out = String::new();
    for (t, member) in set.members().iter().enumerate() {
        writeln!(out, "digraph T{t} {{").unwrap();
        for v in 0..set.order() {
            writeln!(out, "  {v};").unwrap();
        }
        for (i, j) in member.edges() {
            writeln!(out, "  {i} -> {j};").unwrap();
        }
        out.push_str("}\n");
    }
    out
}

fn cell_text(table: &BoundsTable, m: usize, k: usize) -> String {
    match table.cell(m, k) {
        Some(c) if c.is_populated() => {
            let e = c.entry.expect("populated");
            format!("{}{}", e.upper, if c.confirmed_exact { "*" } else { "" })
        }
        _ => String::new(),
    }
}

/// Aligned text grid with rows `k` and columns `m`; `*` marks values known
/// to be exact and redundant or unknown cells are blank.
pub fn render_table_text(table: &BoundsTable) -> String {
    let mut rows: Vec<Vec<String>> =
        vec![std::iter::once("k\\m".to_string()).chain((1..=table.m_max).map(|m| m.to_string())).collect()];
    for k in 0..=table.k_max {
        rows.push(std::iter::once(k.to_string()).chain((1..=table.m_max).map(|m| cell_text(table, m, k))).collect());
    }
    let widths: Vec<usize> = (0..=table.m_max).map(|c| rows.iter().map(|r| r[c].len()).max().unwrap_or(0)).collect();
    let mut out = String::new();
    for row in rows {
        let line: Vec<String> = row.iter().zip(&widths).map(|(s, w)| format!("{s:>w$}")).collect();
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
    }
    out
}

/// `k,m=1,...` header then one line per `k`, same cell text as
/// [`render_table_text`].
pub fn render_table_csv(table: &BoundsTable) -> String {
    let mut out = String::from("k");
    for m in 1..=table.m_max {
        write!(out, ",m={m}").unwrap();
    }
    out.push('\n');
    for k in 0..=table.k_max {
        out.push_str(&k.to_string());
        for m in 1..=table.m_max {
            write!(out, ",{}", cell_text(table, m, k)).unwrap();
        }
        out.push('\n');
    }
    out
}
