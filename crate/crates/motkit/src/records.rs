//! JSONL record format for object lists and detection streams.
//!
//! One object list per line: `{"t": seconds, "objects": [...]}`. The same
//! record carries ground truth, detections (with a `source` field on the line
//! and a `mask` per entry), and fused tracker output. Covariances are
//! serialized row-major with the sentinel convention: unmodeled components
//! get -1 on the diagonal and zeroed off-diagonal rows/columns. Library code
//! never reads sentinel entries; parsing recovers the mask and zeroes the
//! unmodeled block.

use crate::error::{Error, Result};
use crate::object::{
    ClassVector, Detection, DimensionVector, Object, ObjectList, StateMask, StateVector,
    TrackStatus, DIMS_DIM, NUM_CLASSES, STATE_DIM,
};
use nalgebra::{Matrix3, Matrix6};
use serde::{Deserialize, Serialize};
use std::io::{BufRead, Write};

/// Applies the sentinel convention to a covariance for serialization.
///
/// Diagonal entries of unmodeled components become -1 and their off-diagonal
/// rows/columns are zeroed. The inverse operation recovers the mask exactly.
pub fn mask_to_sentinel<const N: usize>(
    cov: &nalgebra::SMatrix<f64, N, N>,
    mask: &[bool; N],
) -> Vec<f64> {
    let mut out = vec![0.0; N * N];
    for i in 0..N {
        for j in 0..N {
            out[i * N + j] = if mask[i] && mask[j] {
                cov[(i, j)]
            } else if i == j {
                -1.0
            } else {
                0.0
            };
        }
    }
    out
}

/// Recovers (covariance, mask) from a sentinel-serialized covariance.
///
/// Unmodeled rows/columns are zeroed in the returned matrix so that no
/// non-physical sentinel value can leak into downstream arithmetic.
pub fn sentinel_to_mask<const N: usize>(
    flat: &[f64],
) -> Result<(nalgebra::SMatrix<f64, N, N>, [bool; N])> {
    if flat.len() != N * N {
        return Err(Error::RecordParse(format!(
            "covariance has {} entries, expected {}",
            flat.len(),
            N * N
        )));
    }
    let mut mask = [true; N];
    for i in 0..N {
        let d = flat[i * N + i];
        if d == -1.0 {
            mask[i] = false;
        } else if !d.is_finite() || d < 0.0 {
            return Err(Error::RecordParse(format!(
                "invalid covariance diagonal entry {d} at index {i}"
            )));
        }
    }
    let mut cov = nalgebra::SMatrix::<f64, N, N>::zeros();
    for i in 0..N {
        for j in 0..N {
            let v = flat[i * N + j];
            if !v.is_finite() {
                return Err(Error::RecordParse(format!(
                    "non-finite covariance entry at ({i}, {j})"
                )));
            }
            if mask[i] && mask[j] {
                cov[(i, j)] = v;
            }
        }
    }
    Ok((cov, mask))
}

#[derive(Debug, Serialize, Deserialize)]
struct ObjectRecord {
    id: u64,
    state: [f64; STATE_DIM],
    state_cov: Vec<f64>,
    /// Record order [w, l, h].
    dims: [f64; DIMS_DIM],
    dims_cov: Vec<f64>,
    existence: f64,
    classes: [f64; NUM_CLASSES],
    status: TrackStatus,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    sensor_t: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    mask: Option<StateMask>,
}

#[derive(Debug, Serialize, Deserialize)]
struct ListRecord {
    t: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    source: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    arrival: Option<f64>,
    objects: Vec<ObjectRecord>,
}

/// One decoded detection-stream line.
#[derive(Debug, Clone)]
pub struct DetectionRecord {
    pub source_id: String,
    /// Sensor timestamp shared by all detections on the line.
    pub timestamp: f64,
    /// Time the batch becomes available to the tracker; equals `timestamp`
    /// when the stream does not model transport delay.
    pub arrival: f64,
    pub detections: Vec<Detection>,
}

fn object_to_record(obj: &Object) -> ObjectRecord {
    let s = &obj.state;
    let masked_state = |i: usize, v: f64| if obj.mask.state[i] { v } else { 0.0 };
    ObjectRecord {
        id: obj.id,
        state: [
            masked_state(0, s.px),
            masked_state(1, s.py),
            masked_state(2, s.vx),
            masked_state(3, s.vy),
            masked_state(4, s.theta),
            masked_state(5, s.omega),
        ],
        state_cov: mask_to_sentinel(&obj.state_cov, &obj.mask.state),
        dims: [
            if obj.mask.dims[1] { obj.dims.width } else { 0.0 },
            obj.dims.length,
            if obj.mask.dims[2] { obj.dims.height } else { 0.0 },
        ],
        dims_cov: mask_to_sentinel(&obj.dims_cov, &obj.mask.dims),
        existence: obj.existence,
        classes: obj.classes.0,
        status: obj.status,
        sensor_t: obj.sensor_t,
        mask: None,
    }
}

fn record_to_object(rec: &ObjectRecord, t: f64) -> Result<Object> {
    let (state_cov, state_mask) = sentinel_to_mask::<STATE_DIM>(&rec.state_cov)?;
    let (dims_cov, dims_mask) = sentinel_to_mask::<DIMS_DIM>(&rec.dims_cov)?;
    let mask = match rec.mask {
        Some(m) => m,
        None => StateMask::new(state_mask, dims_mask).map_err(|e| {
            Error::RecordParse(format!("sentinel mask violates minimum representation: {e}"))
        })?,
    };
    let state = StateVector::new(
        rec.state[0],
        rec.state[1],
        rec.state[2],
        rec.state[3],
        rec.state[4],
        rec.state[5],
    )
    .map_err(|e| Error::RecordParse(format!("bad state vector: {e}")))?;
    let classes = ClassVector::from_weights(rec.classes)
        .map_err(|e| Error::RecordParse(format!("bad class vector: {e}")))?;
    if !(0.0..=1.0).contains(&rec.existence) {
        return Err(Error::RecordParse(format!(
            "existence {} outside [0, 1]",
            rec.existence
        )));
    }
    Ok(Object {
        id: rec.id,
        state,
        state_cov,
        dims: DimensionVector::new(rec.dims[1], rec.dims[0], rec.dims[2]),
        dims_cov,
        existence: rec.existence,
        classes,
        status: rec.status,
        mask,
        history: Vec::new(),
        last_associated: t,
        sensor_t: rec.sensor_t,
        model_state: None,
    })
}

/// Encodes one object list as a single JSONL line (no trailing newline).
pub fn encode_object_list(list: &ObjectList) -> String {
    let rec = ListRecord {
        t: list.timestamp,
        source: None,
        arrival: None,
        objects: list.objects.iter().map(object_to_record).collect(),
    };
    serde_json::to_string(&rec).expect("object list serialization cannot fail")
}

/// Decodes one object-list line. Malformed object entries are dropped with a
/// warning rather than failing the whole line.
pub fn decode_object_list(line: &str) -> Result<ObjectList> {
    let rec: ListRecord =
        serde_json::from_str(line).map_err(|e| Error::RecordParse(e.to_string()))?;
    let mut objects = Vec::with_capacity(rec.objects.len());
    for o in &rec.objects {
        match record_to_object(o, rec.t) {
            Ok(obj) => objects.push(obj),
            Err(e) => log::warn!("dropping object {} at t={}: {}", o.id, rec.t, e),
        }
    }
    ObjectList::new(rec.t, objects)
}

/// Encodes one detection batch as a single JSONL line.
pub fn encode_detection_record(rec: &DetectionRecord) -> String {
    let objects = rec
        .detections
        .iter()
        .enumerate()
        .map(|(i, d)| ObjectRecord {
            id: i as u64,
            state: {
                let s = &d.state;
                let m = |i: usize, v: f64| if d.mask.state[i] { v } else { 0.0 };
                [
                    m(0, s.px),
                    m(1, s.py),
                    m(2, s.vx),
                    m(3, s.vy),
                    m(4, s.theta),
                    m(5, s.omega),
                ]
            },
            state_cov: mask_to_sentinel(&d.meas_cov, &d.mask.state),
            dims: [
                d.dims.width,
                d.dims.length,
                if d.mask.dims[2] { d.dims.height } else { 0.0 },
            ],
            dims_cov: mask_to_sentinel(&d.dims_cov, &d.mask.dims),
            existence: 1.0,
            classes: d.class_hint.unwrap_or_else(ClassVector::unclassified).0,
            status: TrackStatus::Confirmed,
            sensor_t: None,
            mask: Some(d.mask),
        })
        .collect();
    let line = ListRecord {
        t: rec.timestamp,
        source: Some(rec.source_id.clone()),
        arrival: Some(rec.arrival),
        objects,
    };
    serde_json::to_string(&line).expect("detection serialization cannot fail")
}

/// Decodes one detection-stream line. When the line has no `source` field the
/// caller-provided fallback is used (pass-through of plain object lists).
pub fn decode_detection_record(line: &str, fallback_source: &str) -> Result<DetectionRecord> {
    let rec: ListRecord =
        serde_json::from_str(line).map_err(|e| Error::RecordParse(e.to_string()))?;
    let source_id = rec.source.clone().unwrap_or_else(|| fallback_source.to_string());
    let mut detections = Vec::with_capacity(rec.objects.len());
    for o in &rec.objects {
        match record_to_detection(o, &source_id, rec.t) {
            Ok(d) => detections.push(d),
            Err(e) => log::warn!(
                "dropping detection {} from {} at t={}: {}",
                o.id,
                source_id,
                rec.t,
                e
            ),
        }
    }
    Ok(DetectionRecord {
        source_id,
        timestamp: rec.t,
        arrival: rec.arrival.unwrap_or(rec.t),
        detections,
    })
}

fn record_to_detection(rec: &ObjectRecord, source_id: &str, t: f64) -> Result<Detection> {
    let obj = record_to_object(rec, t)?;
    Ok(Detection {
        source_id: source_id.to_string(),
        sensor_timestamp: t,
        state: obj.state,
        meas_cov: obj.state_cov,
        dims: obj.dims,
        dims_cov: obj.dims_cov,
        mask: obj.mask,
        class_hint: if obj.classes.get(crate::object::ObjectClass::Other) >= 1.0 - 1e-9 {
            None
        } else {
            Some(obj.classes)
        },
    })
}

/// Writes lines to a sink with trailing newlines.
pub fn write_lines<W: Write>(sink: &mut W, lines: impl IntoIterator<Item = String>) -> Result<()> {
    for line in lines {
        sink.write_all(line.as_bytes())?;
        sink.write_all(b"\n")?;
    }
    Ok(())
}

/// Reads all object lists from a JSONL reader.
pub fn read_object_lists<R: BufRead>(reader: R) -> Result<Vec<ObjectList>> {
    let mut out = Vec::new();
    for line in reader.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(decode_object_list(&line)?);
    }
    Ok(out)
}

/// Reads all detection records from a JSONL reader.
pub fn read_detection_records<R: BufRead>(
    reader: R,
    fallback_source: &str,
) -> Result<Vec<DetectionRecord>> {
    let mut out = Vec::new();
    for line in reader.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(decode_detection_record(&line, fallback_source)?);
    }
    Ok(out)
}
