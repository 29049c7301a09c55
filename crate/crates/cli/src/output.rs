use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::CliError;

pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

struct Plot {
    data: String,
    title: String,
    xlabel: String,
    ylabel: String,
    labels: Vec<String>,
    log_y: bool,
}

/// Files of one run. Every file name is recorded for the manifest.
pub struct Artifacts {
    dir: PathBuf,
    files: Vec<String>,
    plots: Vec<Plot>,
}

impl Artifacts {
    pub fn create(dir: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(dir)?;
        Ok(Self {
            dir: dir.to_path_buf(),
            files: Vec::new(),
            plots: Vec::new(),
        })
    }

    pub fn files(&self) -> &[String] {
        &self.files
    }

    pub fn writer(&mut self, name: &str) -> Result<BufWriter<File>, CliError> {
        self.files.push(name.to_string());
        Ok(BufWriter::new(File::create(self.dir.join(name))?))
    }

    pub fn csv(
        &mut self,
        name: &str,
        header: &[&str],
        rows: impl IntoIterator<Item = Vec<String>>,
    ) -> Result<(), CliError> {
        let mut w = csv::Writer::from_writer(self.writer(name)?);
        w.write_record(header)?;
        for row in rows {
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        let mut w = self.writer(name)?;
        serde_json::to_writer_pretty(&mut w, value)?;
        writeln!(w)?;
        w.flush()?;
        Ok(())
    }

    /// Two-column data file, one block per series, blocks separated by two
    /// blank lines so that gnuplot can address them by index.
    pub fn plot(
        &mut self,
        name: &str,
        title: &str,
        axes: (&str, &str),
        series: Vec<Series>,
        log_y: bool,
    ) -> Result<(), CliError> {
        let data = format!("{name}.dat");
        let mut w = self.writer(&data)?;
        for (i, s) in series.iter().enumerate() {
            if i > 0 {
                writeln!(w, "\n")?;
            }
            writeln!(w, "# {}", s.label)?;
            for (x, y) in &s.points {
                writeln!(w, "{x} {y}")?;
            }
        }
        w.flush()?;
        self.plots.push(Plot {
            data,
            title: title.to_string(),
            xlabel: axes.0.to_string(),
            ylabel: axes.1.to_string(),
            labels: series.into_iter().map(|s| s.label).collect(),
            log_y,
        });
        Ok(())
    }

    /// Writes the gnuplot script for all plot data files, if any.
    pub fn finish(&mut self) -> Result<(), CliError> {
        if self.plots.is_empty() {
            return Ok(());
        }
        let plots = std::mem::take(&mut self.plots);
        let mut w = self.writer("plot.gp")?;
        writeln!(w, "set terminal pngcairo size 800,600")?;
        writeln!(w, "set key outside right")?;
        for p in &plots {
            let stem = p.data.trim_end_matches(".dat");
            writeln!(w)?;
            writeln!(w, "set output '{stem}.png'")?;
            writeln!(w, "set title '{}'", p.title)?;
            writeln!(w, "set xlabel '{}'", p.xlabel)?;
            writeln!(w, "set ylabel '{}'", p.ylabel)?;
            writeln!(w, "{}", if p.log_y { "set logscale y" } else { "unset logscale y" })?;
            let parts: Vec<String> = p
                .labels
                .iter()
                .enumerate()
                .map(|(i, l)| format!("'{}' index {i} with linespoints title '{l}'", p.data))
                .collect();
            writeln!(w, "plot {}", parts.join(", \\\n     "))?;
        }
        w.flush()?;
        Ok(())
    }
}

#[derive(Debug, Serialize)]
pub struct Manifest<'a> {
    pub tool: &'static str,
    pub version: &'static str,
    pub subcommand: &'a str,
    pub seed: u64,
    pub budget: usize,
    pub config_file: Option<String>,
    pub parameters: serde_json::Value,
    pub files: Vec<String>,
    pub summary: serde_json::Value,
    pub wall_seconds: f64,
    pub finished_unix_seconds: u64,
}

pub fn fmt(x: f64) -> String {
    x.to_string()
}
