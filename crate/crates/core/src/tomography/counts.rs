use std::io::{Read, Write};

use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use super::settings::{Basis, MeasurementSetting, Probe};
use crate::error::{Error, Result};
use crate::parallel::{map_indexed, Execution};
use crate::qmath::DensityMatrix;
use crate::rng::sub_stream;

/// Detection counts of one setting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SettingCounts {
    pub probe: Probe,
    pub basis: Basis,
    pub n_plus: u64,
    pub n_minus: u64,
}

impl SettingCounts {
    pub fn setting(&self) -> MeasurementSetting {
        MeasurementSetting {
            probe: self.probe,
            basis: self.basis,
        }
    }

    pub fn shots(&self) -> u64 {
        self.n_plus + self.n_minus
    }
}

/// Counts for all 18 settings, each with the same number of shots.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountTable {
    shots: u64,
    rows: Vec<SettingCounts>,
}

#[derive(Debug, Serialize, Deserialize)]
struct CsvRow {
    probe: String,
    basis: String,
    n_plus: u64,
    n_minus: u64,
    shots: u64,
}

impl CountTable {
    /// Rows are stored in canonical (probe-major) setting order.
    pub fn new(shots: u64, rows: Vec<SettingCounts>) -> Result<Self> {
        if shots == 0 {
            return Err(Error::OutOfRange {
                name: "shots",
                value: 0.0,
            });
        }
        let mut ordered = Vec::with_capacity(18);
        for setting in MeasurementSetting::all() {
            let mut matching = rows.iter().filter(|r| r.setting() == setting);
            let row = matching
                .next()
                .ok_or_else(|| Error::Parse(format!("missing setting {}/{}", setting.probe, setting.basis)))?;
            if matching.next().is_some() {
                return Err(Error::Parse(format!(
                    "duplicate setting {}/{}",
                    setting.probe, setting.basis
                )));
            }
            if row.shots() != shots {
                return Err(Error::Parse(format!(
                    "setting {}/{}: n_plus + n_minus = {} but shots = {shots}",
                    setting.probe,
                    setting.basis,
                    row.shots()
                )));
            }
            ordered.push(*row);
        }
        if rows.len() != 18 {
            return Err(Error::Parse(format!("expected 18 rows, got {}", rows.len())));
        }
        Ok(Self { shots, rows: ordered })
    }

    pub fn shots(&self) -> u64 {
        self.shots
    }

    pub fn rows(&self) -> &[SettingCounts] {
        &self.rows
    }

    pub fn get(&self, setting: MeasurementSetting) -> &SettingCounts {
        self.rows
            .iter()
            .find(|r| r.setting() == setting)
            .expect("table holds every setting")
    }

    /// Flat CSV: `probe,basis,n_plus,n_minus,shots`, one row per setting.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        for r in &self.rows {
            w.serialize(CsvRow {
                probe: r.probe.label().to_string(),
                basis: r.basis.label().to_string(),
                n_plus: r.n_plus,
                n_minus: r.n_minus,
                shots: self.shots,
            })?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        String::from_utf8(buf).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(reader);
        let mut rows = Vec::new();
        let mut shots = None;
        for rec in rdr.deserialize::<CsvRow>() {
            let rec = rec?;
            if *shots.get_or_insert(rec.shots) != rec.shots {
                return Err(Error::Parse("shots differ between rows".into()));
            }
            rows.push(SettingCounts {
                probe: rec.probe.parse()?,
                basis: rec.basis.parse()?,
                n_plus: rec.n_plus,
                n_minus: rec.n_minus,
            });
        }
        Self::new(shots.unwrap_or(0), rows)
    }
}

/// Probability of the "plus" outcome for every setting, in canonical order.
pub fn born_probabilities<F>(channel: F) -> Result<Vec<f64>>
where
    F: Fn(&DensityMatrix) -> Result<DensityMatrix>,
{
    MeasurementSetting::all()
        .into_iter()
        .map(|s| {
            let out = channel(&s.probe.state().density())?;
            Ok(out.expectation(&s.basis.plus()).clamp(0.0, 1.0))
        })
        .collect()
}

/// Sends each probe through `channel` and draws binomial counts for the two
/// projectors of each basis. Setting `k` draws from sub-stream `k` of `seed`.
pub fn simulate_counts<F>(channel: F, shots: u64, seed: u64, exec: Execution) -> Result<CountTable>
where
    F: Fn(&DensityMatrix) -> Result<DensityMatrix> + Sync + Send,
{
    if shots == 0 {
        return Err(Error::OutOfRange {
            name: "shots",
            value: 0.0,
        });
    }
    let settings = MeasurementSetting::all();
    let rows = map_indexed(exec, settings.len() as u64, |k| -> Result<SettingCounts> {
        let s = settings[k as usize];
        let out = channel(&s.probe.state().density())?;
        let p = out.expectation(&s.basis.plus()).clamp(0.0, 1.0);
        let mut rng = sub_stream(seed, k);
        let n_plus = Binomial::new(shots, p)
            .map_err(|e| Error::Parse(e.to_string()))?
            .sample(&mut rng);
        Ok(SettingCounts {
            probe: s.probe,
            basis: s.basis,
            n_plus,
            n_minus: shots - n_plus,
        })
    });
    CountTable::new(shots, rows.into_iter().collect::<Result<Vec<_>>>()?)
}
