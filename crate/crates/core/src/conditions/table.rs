//! Cell tables: which conditions characterize `A in (X : Y)`.

use serde::Serialize;

use super::{eval_conditions, ConditionId, ConditionReport, EvalConfig};
use crate::error::{Error, Result};
use crate::matrix::InfMatrix;
use crate::space::{ClassicalSpace, Verdict};

use ClassicalSpace::{BS, C, C0, CS, LInf};
use ConditionId::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TableCell {
    pub number: u8,
    pub from: ClassicalSpace,
    pub to: ClassicalSpace,
    pub conditions: &'static [ConditionId],
}

impl TableCell {
    /// `5. (c : c) -> {C1, C9, C3}`
    pub fn label(&self) -> String {
        let conds: Vec<&str> = self.conditions.iter().map(|c| c.as_str()).collect();
        format!("{}. ({} : {}) -> {{{}}}", self.number, self.from, self.to, conds.join(", "))
    }
}

const CELL1: &[ConditionId] = &[C1];
const CELL2: &[ConditionId] = &[C1, C9];
const CELL3: &[ConditionId] = &[C6];
const CELL4: &[ConditionId] = &[C6, C7];
const CELL5: &[ConditionId] = &[C1, C9, C3];
const CELL6: &[ConditionId] = &[C6, C7, C8];
const CELL7: &[ConditionId] = &[C9, C4];
const CELL8: &[ConditionId] = &[C10];
const CELL9: &[ConditionId] = &[D3];
const CELL10: &[ConditionId] = &[C1, C5, D2];
const CELL11: &[ConditionId] = &[D1, D4];
const CELL12: &[ConditionId] = &[C5, D5];
const CELL13: &[ConditionId] = &[D1, D6, D7];
const CELL14: &[ConditionId] = &[D5, C9];
const CELL15: &[ConditionId] = &[D1, D5];
const CELL16: &[ConditionId] = &[D5, D8];

const fn cell(number: u8, from: ClassicalSpace, to: ClassicalSpace, conditions: &'static [ConditionId]) -> TableCell {
    TableCell { number, from, to, conditions }
}

/// Every supported `(from, to)` pair. Sources `c0, c, linf` into
/// `linf, c, bs, cs`, then sources `linf, c, bs, cs` into `c0, c, linf`
/// for the pairs not already listed.
pub const CELLS: [TableCell; 20] = [
    cell(1, C0, LInf, CELL1),
    cell(2, C0, C, CELL2),
    cell(3, C0, BS, CELL3),
    cell(4, C0, CS, CELL4),
    cell(1, C, LInf, CELL1),
    cell(5, C, C, CELL5),
    cell(3, C, BS, CELL3),
    cell(6, C, CS, CELL6),
    cell(1, LInf, LInf, CELL1),
    cell(7, LInf, C, CELL7),
    cell(3, LInf, BS, CELL3),
    cell(8, LInf, CS, CELL8),
    cell(9, LInf, C0, CELL9),
    cell(10, C, C0, CELL10),
    cell(11, BS, C0, CELL11),
    cell(12, CS, C0, CELL12),
    cell(13, BS, C, CELL13),
    cell(14, CS, C, CELL14),
    cell(15, BS, LInf, CELL15),
    cell(16, CS, LInf, CELL16),
];

pub fn lookup_cell(from: ClassicalSpace, to: ClassicalSpace) -> Option<TableCell> {
    CELLS.iter().copied().find(|c| c.from == from && c.to == to)
}

pub fn supported_pairs() -> Vec<(ClassicalSpace, ClassicalSpace)> {
    CELLS.iter().map(|c| (c.from, c.to)).collect()
}

pub(crate) fn unsupported(from: impl ToString, to: impl ToString) -> Error {
    let list: Vec<String> = CELLS.iter().map(|c| format!("({}:{})", c.from, c.to)).collect();
    Error::UnsupportedClass { from: from.to_string(), to: to.to_string(), supported: list.join(", ") }
}

/// A transformed matrix the characterization was run on.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DerivedMatrix {
    pub symbol: String,
    pub name: String,
    pub formula: String,
}

/// A per-row side condition (row membership in a dual).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SideCheck {
    pub label: String,
    pub verdict: Verdict,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassReport {
    pub from: String,
    pub to: String,
    pub matrix: String,
    pub table_cell: String,
    pub cell_number: u8,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub derived_matrix: Option<DerivedMatrix>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub side_checks: Vec<SideCheck>,
    pub per_condition: Vec<ConditionReport>,
    pub verdict: Verdict,
    pub config: EvalConfig,
    pub notes: Vec<String>,
}

impl ClassReport {
    /// Recompute the conjunction after editing side checks or conditions.
    pub fn refresh_verdict(&mut self) {
        self.verdict = Verdict::all(
            self.per_condition.iter().map(|r| r.verdict).chain(self.side_checks.iter().map(|s| s.verdict)),
        );
    }

    pub fn condition(&self, id: ConditionId) -> Option<&ConditionReport> {
        self.per_condition.iter().find(|r| r.id == id)
    }
}

/// Evaluate the cell for `(from : to)` on `a` and conjoin.
pub fn characterize_class(
    a: &InfMatrix<f64>,
    from: ClassicalSpace,
    to: ClassicalSpace,
    cfg: &EvalConfig,
) -> Result<ClassReport> {
    let cell = lookup_cell(from, to).ok_or_else(|| unsupported(from, to))?;
    let per_condition = eval_conditions(a, cell.conditions, cfg)?;
    let mut report = ClassReport {
        from: from.to_string(),
        to: to.to_string(),
        matrix: a.name().to_string(),
        table_cell: cell.label(),
        cell_number: cell.number,
        derived_matrix: None,
        side_checks: Vec::new(),
        per_condition,
        verdict: Verdict::Inconclusive,
        config: *cfg,
        notes: Vec::new(),
    };
    if report.per_condition.iter().any(|r| r.truncation_limited) {
        report.notes.push(format!("satisfied checks certify rows n <= {} only", cfg.n));
    }
    report.refresh_verdict();
    Ok(report)
}
