//! Deterministic CSV: comment lines with the version and seeds, a header fixed
//! by the experiment tag, numbers at 12 significant digits.

use std::io::Write;

use anyhow::Result;
pub use pqsum::reductions::format_sig as fmt_num;

use crate::config::ExperimentConfig;
use crate::experiments::Table;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub fn write_csv<W: Write>(mut out: W, cfg: &ExperimentConfig, seeds: &[u64], table: &Table) -> Result<()> {
    writeln!(out, "# pqsum {VERSION}")?;
    writeln!(out, "# experiment={}", cfg.experiment.tag())?;
    writeln!(out, "# seeds={}", seeds.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(","))?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(&table.columns)?;
    for row in &table.rows {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn csv_string(cfg: &ExperimentConfig, seeds: &[u64], table: &Table) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(&mut buf, cfg, seeds, table)?;
    Ok(String::from_utf8(buf)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::ExperimentKind;

    #[test]
    fn comments_header_and_quoting() {
        let cfg = ExperimentConfig::new(ExperimentKind::QuotientSuite);
        let table = Table { columns: vec!["a".into(), "b".into()], rows: vec![vec!["1".into(), "x,y".into()]], seeds: vec![3, 4] };
        let text = csv_string(&cfg, &table.seeds, &table).unwrap();
        assert_eq!(text, format!("# pqsum {VERSION}\n# experiment=quotient_suite\n# seeds=3,4\na,b\n1,\"x,y\"\n"));
        assert_eq!(fmt_num(1.0 / 3.0), "0.333333333333");
    }
}
