//! CSV output.
//!
//! Columns, in order:
//!
//! | column | meaning |
//! |---|---|
//! | `scheme` | `overlay`, `underlay1` or `underlay2` |
//! | `cell_type` | 1 to 5 |
//! | `enb_density` | eNBs per km² of the cell type |
//! | `n_cues`, `n_pairs` | population |
//! | `seed` | seed of the replication |
//! | `avg_total_ul_bps` | network uplink sum per snapshot, averaged over snapshots |
//! | `avg_pair_bps` | pair share of the above |
//! | `avg_cue_dl_bps` | CUE downlink sum per snapshot, averaged over snapshots |
//! | `g_dir_pct`, `g_off_pct`, `g_tot_pct` | gains over the D2D-disabled run |
//!
//! Throughputs are those of the D2D-enabled run. Undefined gains are written
//! as `NaN`. Lines starting with `#` before the header carry run metadata.

use std::fmt::Write as _;
use std::io;
use std::path::Path;

use crate::runner::Replication;

pub const CSV_HEADER: &str = "scheme,cell_type,enb_density,n_cues,n_pairs,seed,avg_total_ul_bps,avg_pair_bps,avg_cue_dl_bps,g_dir_pct,g_off_pct,g_tot_pct";

pub fn csv_row(r: &Replication) -> String {
    let cfg = &r.run.enabled.config;
    let en = &r.run.enabled;
    let g = &r.run.gains;
    format!(
        "{},{},{:.1},{},{},{},{},{},{},{},{},{}",
        cfg.scheme.as_str(),
        cfg.cell_type.id,
        cfg.cell_type.enb_density_per_km2,
        cfg.n_cues,
        cfg.n_pairs,
        cfg.seed,
        en.avg_total_ul_bps,
        en.avg_pair_bps,
        en.avg_cue_dl_bps,
        g.g_dir,
        g.g_off,
        g.g_tot,
    )
}

/// Full CSV text: `#` metadata lines, header, one row per replication.
pub fn to_csv(metadata: &[String], rows: &[Replication]) -> String {
    let mut s = String::new();
    for m in metadata {
        let _ = writeln!(s, "# {m}");
    }
    let _ = writeln!(s, "{CSV_HEADER}");
    for r in rows {
        let _ = writeln!(s, "{}", csv_row(r));
    }
    s
}

pub fn emit_csv(path: &Path, metadata: &[String], rows: &[Replication]) -> io::Result<()> {
    std::fs::write(path, to_csv(metadata, rows))
}
