use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::trial::{Arm, TrialDataset};

/// 2×2 table of complete responses by arm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrTable {
    pub control_cr: usize,
    pub control_total: usize,
    pub experimental_cr: usize,
    pub experimental_total: usize,
}

impl CrTable {
    pub fn from_dataset(data: &TrialDataset) -> Self {
        let mut table = CrTable {
            control_cr: 0,
            control_total: 0,
            experimental_cr: 0,
            experimental_total: 0,
        };
        for r in &data.records {
            let (cr, total) = match r.arm {
                Arm::Control => (&mut table.control_cr, &mut table.control_total),
                Arm::Experimental => (&mut table.experimental_cr, &mut table.experimental_total),
            };
            *total += 1;
            if r.cr_flag {
                *cr += 1;
            }
        }
        table
    }

    /// Sample odds ratio, experimental vs control. Any empty cell triggers
    /// the Haldane–Anscombe correction (+0.5 on every cell).
    pub fn odds_ratio(&self) -> Result<OddsRatioEstimate> {
        if self.control_total == 0 {
            return Err(Error::EmptyArm("control"));
        }
        if self.experimental_total == 0 {
            return Err(Error::EmptyArm("experimental"));
        }
        let cells = [
            self.experimental_cr,
            self.experimental_total - self.experimental_cr,
            self.control_cr,
            self.control_total - self.control_cr,
        ];
        let corrected = cells.contains(&0);
        let shift = if corrected { 0.5 } else { 0.0 };
        let [a, b, c, d] = cells.map(|x| x as f64 + shift);
        Ok(OddsRatioEstimate {
            estimate: (a / b) / (c / d),
            table: *self,
            corrected,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OddsRatioEstimate {
    pub estimate: f64,
    pub table: CrTable,
    /// Zero-cell continuity correction was applied.
    pub corrected: bool,
}

/// Observed response odds ratio of an interim dataset.
pub fn cr_odds_ratio(data: &TrialDataset) -> Result<OddsRatioEstimate> {
    CrTable::from_dataset(data).odds_ratio()
}
