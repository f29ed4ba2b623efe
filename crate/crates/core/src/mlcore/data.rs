use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::MlError;

/// Row-major `n x d` feature matrix with binary labels, in chronological order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    features: Vec<f32>,
    n_features: usize,
    labels: Vec<u8>,
}

impl Dataset {
    pub fn new(features: Vec<f32>, n_features: usize, labels: Vec<u8>) -> Result<Self, MlError> {
        if n_features == 0 {
            return Err(MlError::Data("datasets need at least one feature".into()));
        }
        if features.len() != labels.len() * n_features {
            return Err(MlError::Data(format!(
                "{} values do not form {} rows of {} features",
                features.len(),
                labels.len(),
                n_features
            )));
        }
        if let Some(i) = labels.iter().position(|&l| l > 1) {
            return Err(MlError::Data(format!("row {i}: label must be 0 or 1")));
        }
        if let Some(i) = features.iter().position(|v| !v.is_finite()) {
            return Err(MlError::Data(format!(
                "row {}: feature f{} is not a finite number",
                i / n_features,
                i % n_features
            )));
        }
        Ok(Dataset {
            features,
            n_features,
            labels,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn row(&self, i: usize) -> &[f32] {
        &self.features[i * self.n_features..(i + 1) * self.n_features]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f32]> + '_ {
        self.features.chunks_exact(self.n_features)
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn features(&self) -> &[f32] {
        &self.features
    }

    pub(crate) fn features_mut(&mut self) -> &mut [f32] {
        &mut self.features
    }

    /// Rows `range` as a new dataset; order is preserved.
    pub fn slice(&self, range: std::ops::Range<usize>) -> Dataset {
        Dataset {
            features: self.features[range.start * self.n_features..range.end * self.n_features].to_vec(),
            n_features: self.n_features,
            labels: self.labels[range].to_vec(),
        }
    }

    /// Appends `other`'s rows after this dataset's rows.
    pub fn concat(&self, other: &Dataset) -> Result<Dataset, MlError> {
        if other.n_features != self.n_features {
            return Err(MlError::Dimension {
                expected: self.n_features,
                found: other.n_features,
            });
        }
        let mut out = self.clone();
        out.features.extend_from_slice(&other.features);
        out.labels.extend_from_slice(&other.labels);
        Ok(out)
    }

    /// Reads `f0,...,f{d-1},label` CSV.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self, MlError> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
        let headers = rdr.headers().map_err(csv_error)?.clone();
        let width = headers.len();
        if width < 2 || &headers[width - 1] != "label" {
            return Err(MlError::Data("CSV header must be f0,...,f{d-1},label".into()));
        }
        for (i, h) in headers.iter().take(width - 1).enumerate() {
            if h != format!("f{i}") {
                return Err(MlError::Data(format!(
                    "CSV header column {} is '{h}', expected 'f{i}'",
                    i + 1
                )));
            }
        }
        let d = width - 1;
        let mut features = Vec::new();
        let mut labels = Vec::new();
        for (r, record) in rdr.records().enumerate() {
            let record = record.map_err(csv_error)?;
            let line = r + 2;
            if record.len() != width {
                return Err(MlError::Data(format!(
                    "line {line}: expected {width} fields, found {}",
                    record.len()
                )));
            }
            for (c, field) in record.iter().take(d).enumerate() {
                let v: f32 = field
                    .trim()
                    .parse()
                    .map_err(|_| MlError::Data(format!("line {line}: f{c} = '{field}' is not a number")))?;
                if !v.is_finite() {
                    return Err(MlError::Data(format!("line {line}: f{c} is not finite")));
                }
                features.push(v);
            }
            let label = match record[d].trim() {
                "0" => 0,
                "1" => 1,
                other => return Err(MlError::Data(format!("line {line}: label '{other}' must be 0 or 1"))),
            };
            labels.push(label);
        }
        Dataset::new(features, d, labels)
    }

    /// Writes the CSV layout read by [`Dataset::read_csv`]; floats use their
    /// shortest round-tripping form.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<(), MlError> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header: Vec<String> = (0..self.n_features).map(|i| format!("f{i}")).collect();
        header.push("label".into());
        w.write_record(&header).map_err(csv_error)?;
        let mut record = Vec::with_capacity(self.n_features + 1);
        for (row, label) in self.rows().zip(&self.labels) {
            record.clear();
            record.extend(row.iter().map(|v| v.to_string()));
            record.push(label.to_string());
            w.write_record(&record).map_err(csv_error)?;
        }
        w.flush().map_err(|e| MlError::Data(e.to_string()))
    }
}

fn csv_error(e: csv::Error) -> MlError {
    MlError::Data(format!("CSV: {e}"))
}

/// Share of rows, taken from the front, that the pipeline trains on.
pub const TRAIN_FRACTION: f64 = 0.8;

/// First `floor(train_fraction * n)` rows train, the rest test. Never shuffles.
pub fn chronological_split(data: &Dataset, train_fraction: f64) -> Result<(Dataset, Dataset), MlError> {
    let n = data.len();
    if n < 2 {
        return Err(MlError::Data(format!("cannot split {n} rows")));
    }
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(MlError::Config(format!(
            "train fraction {train_fraction} must lie strictly between 0 and 1"
        )));
    }
    let cut = (train_fraction * n as f64).floor() as usize;
    if cut == 0 || cut == n {
        return Err(MlError::Data(format!(
            "a {train_fraction} split of {n} rows leaves one side empty"
        )));
    }
    Ok((data.slice(0..cut), data.slice(cut..n)))
}

/// Per-feature z-score parameters (population standard deviation).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    /// Strictly positive; zero-variance columns are stored as 1.
    pub std: Vec<f64>,
    pub count: usize,
}

/// Fits z-score parameters on `train` only.
pub fn fit_standardizer(train: &Dataset) -> Result<Standardizer, MlError> {
    if train.is_empty() {
        return Err(MlError::Data("cannot fit a standardizer on an empty dataset".into()));
    }
    let d = train.n_features();
    let n = train.len() as f64;
    let mut mean = vec![0.0f64; d];
    for row in train.rows() {
        for (m, &v) in mean.iter_mut().zip(row) {
            *m += v as f64;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n);
    let mut var = vec![0.0f64; d];
    for row in train.rows() {
        for ((s, &v), m) in var.iter_mut().zip(row).zip(&mean) {
            let dv = v as f64 - m;
            *s += dv * dv;
        }
    }
    let std = var
        .into_iter()
        .map(|s| {
            let sd = (s / n).sqrt();
            if sd > 0.0 {
                sd
            } else {
                1.0
            }
        })
        .collect();
    Ok(Standardizer {
        mean,
        std,
        count: train.len(),
    })
}

impl Standardizer {
    pub fn n_features(&self) -> usize {
        self.mean.len()
    }

    fn check(&self, width: usize) -> Result<(), MlError> {
        if width != self.n_features() {
            return Err(MlError::Dimension {
                expected: self.n_features(),
                found: width,
            });
        }
        Ok(())
    }

    pub fn transform_row(&self, row: &mut [f32]) -> Result<(), MlError> {
        self.check(row.len())?;
        for ((v, m), s) in row.iter_mut().zip(&self.mean).zip(&self.std) {
            *v = ((*v as f64 - m) / s) as f32;
        }
        Ok(())
    }

    pub fn inverse_transform_row(&self, row: &mut [f32]) -> Result<(), MlError> {
        self.check(row.len())?;
        for ((v, m), s) in row.iter_mut().zip(&self.mean).zip(&self.std) {
            *v = (*v as f64 * s + m) as f32;
        }
        Ok(())
    }

    pub fn transform(&self, data: &Dataset) -> Result<Dataset, MlError> {
        self.check(data.n_features())?;
        let mut out = data.clone();
        let d = out.n_features();
        for row in out.features_mut().chunks_exact_mut(d) {
            self.transform_row(row)?;
        }
        Ok(out)
    }

    /// Writes a `mean,std` header and one row per feature. Values use the
    /// shortest round-tripping decimal form.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<(), MlError> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["mean", "std"]).map_err(csv_error)?;
        for (m, s) in self.mean.iter().zip(&self.std) {
            w.write_record([m.to_string(), s.to_string()]).map_err(csv_error)?;
        }
        w.flush().map_err(|e| MlError::Data(e.to_string()))
    }

    pub fn read_csv<R: Read>(reader: R) -> Result<Self, MlError> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
        let headers = rdr.headers().map_err(csv_error)?.clone();
        if headers.iter().collect::<Vec<_>>() != ["mean", "std"] {
            return Err(MlError::Data("standardizer header must be mean,std".into()));
        }
        let (mut mean, mut std) = (Vec::new(), Vec::new());
        for (r, record) in rdr.records().enumerate() {
            let record = record.map_err(csv_error)?;
            let field = |i: usize| -> Result<f64, MlError> {
                record
                    .get(i)
                    .and_then(|v| v.trim().parse::<f64>().ok())
                    .ok_or_else(|| MlError::Data(format!("line {}: expected two numbers", r + 2)))
            };
            let (m, s) = (field(0)?, field(1)?);
            if !m.is_finite() || !(s.is_finite() && s > 0.0) {
                return Err(MlError::Data(format!(
                    "line {}: mean must be finite and std positive",
                    r + 2
                )));
            }
            mean.push(m);
            std.push(s);
        }
        if mean.is_empty() {
            return Err(MlError::Data("standardizer has no rows".into()));
        }
        Ok(Standardizer { mean, std, count: 0 })
    }

    /// Leaves every column unchanged.
    pub fn identity(n_features: usize) -> Self {
        Standardizer {
            mean: vec![0.0; n_features],
            std: vec![1.0; n_features],
            count: 0,
        }
    }

    pub fn inverse_transform(&self, data: &Dataset) -> Result<Dataset, MlError> {
        self.check(data.n_features())?;
        let mut out = data.clone();
        let d = out.n_features();
        for row in out.features_mut().chunks_exact_mut(d) {
            self.inverse_transform_row(row)?;
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ds(rows: &[&[f32]], labels: &[u8]) -> Dataset {
        let d = rows[0].len();
        Dataset::new(rows.concat(), d, labels.to_vec()).unwrap()
    }

    #[test]
    fn split_sizes_and_identity() {
        let data = Dataset::new((0..10).map(|i| i as f32).collect(), 1, vec![0; 10]).unwrap();
        let (a, b) = chronological_split(&data, 0.8).unwrap();
        assert_eq!((a.len(), b.len()), (8, 2));
        assert_eq!(a.concat(&b).unwrap(), data);
        let big = Dataset::new(vec![0.0; 2205], 1, vec![0; 2205]).unwrap();
        let (a, b) = chronological_split(&big, 0.8).unwrap();
        assert_eq!((a.len(), b.len()), (1764, 441));
        let one = Dataset::new(vec![0.0], 1, vec![0]).unwrap();
        assert!(chronological_split(&one, 0.8).is_err());
    }

    #[test]
    fn standardizer_csv_round_trip() {
        let s = Standardizer {
            mean: vec![0.1, -3.5],
            std: vec![1.0 / 3.0, 2.0],
            count: 0,
        };
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        assert!(buf.starts_with(b"mean,std\n"));
        assert_eq!(Standardizer::read_csv(buf.as_slice()).unwrap(), s);
        assert!(Standardizer::read_csv(&b"mean,std\n1,0\n"[..]).is_err());
        assert!(Standardizer::read_csv(&b"a,b\n1,1\n"[..]).is_err());
    }

    #[test]
    fn constant_column_gets_unit_std() {
        let s = fit_standardizer(&ds(&[&[4.0], &[4.0], &[4.0]], &[0, 1, 0])).unwrap();
        assert_eq!((s.mean[0], s.std[0]), (4.0, 1.0));
    }

    #[test]
    fn two_point_column() {
        let data = ds(&[&[0.0], &[2.0]], &[0, 1]);
        let s = fit_standardizer(&data).unwrap();
        assert_eq!((s.mean[0], s.std[0]), (1.0, 1.0));
        assert_eq!(s.transform(&data).unwrap().features(), [-1.0, 1.0]);
    }

    #[test]
    fn transformed_columns_are_centred_and_scaled() {
        let vals = [
            0.3f32, -1.2, 5.0, 2.2, 0.0, -3.0, 1.7, 9.1, 0.5, -0.4, 3.3, 2.0, 8.8, -2.5, 1.0,
        ];
        let data = Dataset::new(vals.to_vec(), 3, vec![0, 1, 0, 1, 0]).unwrap();
        let t = fit_standardizer(&data).unwrap().transform(&data).unwrap();
        for c in 0..3 {
            let col: Vec<f64> = t.rows().map(|r| r[c] as f64).collect();
            let mean = col.iter().sum::<f64>() / 5.0;
            let var = col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / 5.0;
            assert!(mean.abs() <= 1e-6, "column {c} mean {mean}");
            assert!((var.sqrt() - 1.0).abs() <= 1e-6, "column {c} std {}", var.sqrt());
        }
    }

    #[test]
    fn csv_round_trip() {
        let data = ds(&[&[0.1, -2.5e-8], &[3.0, 1e30]], &[1, 0]);
        let mut buf = Vec::new();
        data.write_csv(&mut buf).unwrap();
        assert!(buf.starts_with(b"f0,f1,label\n"));
        assert_eq!(Dataset::read_csv(&buf[..]).unwrap(), data);
    }

    #[test]
    fn csv_rejects_bad_input() {
        assert!(Dataset::read_csv(&b"a,label\n1,0\n"[..]).is_err());
        assert!(Dataset::read_csv(&b"f0,label\n1,2\n"[..]).is_err());
        assert!(Dataset::read_csv(&b"f0,label\nx,0\n"[..]).is_err());
        assert!(Dataset::read_csv(&b"f0,label\nNaN,0\n"[..]).is_err());
    }
}
