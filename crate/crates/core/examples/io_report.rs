//! GSTB and CSV matrix files plus a JSON report, as the CLI writes them.

use geostab::io::{read_matrix, write_matrix, MatrixFormat, ReportFile, ResultEntry, RunConfig};
use geostab::stability::shesha_feature_split;
use geostab::synthetic::{gen_mixed, MixedSpec};

fn main() -> geostab::Result<()> {
    let dir = std::env::temp_dir().join("geostab_io_example");
    std::fs::create_dir_all(&dir)?;
    let x = gen_mixed(&MixedSpec::default())?;
    let bin = dir.join("x.gstb");
    let csv = dir.join("x.csv");
    write_matrix(&bin, &x, MatrixFormat::Gstb)?;
    write_matrix(&csv, &x, MatrixFormat::Csv)?;
    let (a, b) = (read_matrix(&bin)?, read_matrix(&csv)?);
    println!(
        "GSTB {} bytes, CSV {} bytes, identical after reading: {}",
        std::fs::metadata(&bin)?.len(),
        std::fs::metadata(&csv)?.len(),
        a == b
    );

    let cfg = RunConfig::default();
    let score = shesha_feature_split(&a, &cfg.shesha())?;
    let mut report = ReportFile::new("metrics", cfg.seed, cfg.echo());
    let mut entry = ResultEntry::new("shesha_fs", score.value);
    entry.per_split = Some(score.per_split);
    report.results.push(entry);
    print!("{}", report.to_json()?);
    Ok(())
}
