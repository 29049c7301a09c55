use std::io::Write;

use serde::{Deserialize, Serialize};

use super::estimators::{
    barcode_entropy, order_verdicts, sequential_entropy, EntropyProfile, OrderVerdict,
    SequentialEstimate, Window,
};
use super::schedule::Schedule;
use super::sequence::{BarcodeSequence, Provenance};
use super::EntropyError;

/// ε-grid × k table with fitted growth rates and verdicts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyReport {
    pub provenance: Provenance,
    pub window: Window,
    /// (ε, k, b_ε(k))
    pub table: Vec<(f64, u32, u128)>,
    pub profile: EntropyProfile,
    pub sequential: Vec<SequentialEstimate>,
    pub order: Vec<OrderVerdict>,
}

pub const ORDER_TOLERANCE: f64 = 0.02;

impl EntropyReport {
    pub fn build(
        seq: &BarcodeSequence,
        eps_grid: &[f64],
        schedules: &[Schedule],
        window: Window,
    ) -> Result<Self, EntropyError> {
        let profile = barcode_entropy(seq, eps_grid, window)?;
        let mut table = Vec::new();
        for &eps in eps_grid {
            for (&k, b) in seq.entries() {
                if window.contains(k) {
                    table.push((eps, k, b.b_eps(eps)?));
                }
            }
        }
        let sequential = schedules
            .iter()
            .map(|s| sequential_entropy(seq, s, window))
            .collect::<Result<Vec<_>, _>>()?;
        let ks: Vec<u32> = seq.ks().filter(|&k| window.contains(k)).collect();
        let order = order_verdicts(&sequential, &ks, ORDER_TOLERANCE);
        Ok(Self {
            provenance: seq.provenance,
            window,
            table,
            profile,
            sequential,
            order,
        })
    }

    pub fn write_json<W: Write>(&self, w: W) -> serde_json::Result<()> {
        serde_json::to_writer_pretty(w, self)
    }

    /// `eps,k,b` rows.
    pub fn write_table_csv<W: Write>(&self, w: W) -> csv::Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["eps_action_units", "k_iterations", "b_eps_bars"])?;
        for (eps, k, b) in &self.table {
            out.write_record([eps.to_string(), k.to_string(), b.to_string()])?;
        }
        out.flush()?;
        Ok(())
    }

    /// Two-column `k log2(b)` plot data, one block per ε, blocks separated
    /// by blank lines.
    pub fn plot_data(&self) -> Vec<(f64, String)> {
        self.profile
            .profile
            .iter()
            .map(|(eps, fit)| {
                let mut s = format!("# eps = {eps}\n# k log2_b\n");
                for &(k, b) in &fit.points {
                    if b > 0 {
                        s.push_str(&format!("{k} {}\n", (b as f64).log2()));
                    }
                }
                (*eps, s)
            })
            .collect()
    }
}
