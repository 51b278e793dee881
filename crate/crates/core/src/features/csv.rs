//! Per-finger feature rows: `subject,sample,hand,finger,a1..a10,b1..b10,c1..c10`
//! with six decimals.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::hand::{Hand, FINGER_NAMES};

use super::{FingerFeatures, HandFeatureVector, FEATURES_PER_FINGER};

pub const FEATURE_HEADER: [&str; 4] = ["subject", "sample", "hand", "finger"];

fn header() -> Vec<String> {
    let mut h: Vec<String> = FEATURE_HEADER.iter().map(|s| s.to_string()).collect();
    for set in ["a", "b", "c"] {
        h.extend((1..=10).map(|i| format!("{set}{i}")));
    }
    h
}

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Format(format!("{other:?}")),
    }
}

/// One row per finger, fingers in pipeline order.
pub fn write_features<W: Write>(w: W, vectors: &[HandFeatureVector]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(header()).map_err(csv_err)?;
    for v in vectors {
        for (i, f) in v.fingers.iter().enumerate() {
            let mut rec = vec![
                v.subject.clone(),
                v.sample.clone(),
                v.hand.to_string(),
                FINGER_NAMES[i].to_string(),
            ];
            rec.extend(f.values().map(|x| format!("{x:.6}")));
            out.write_record(&rec).map_err(csv_err)?;
        }
    }
    out.flush()?;
    Ok(())
}

/// Reads rows back into hand vectors, grouping consecutive rows of the same
/// subject, sample and hand. Every hand must list its fingers in order starting
/// with the thumb.
pub fn read_features<R: Read>(r: R) -> Result<Vec<HandFeatureVector>> {
    let mut rdr = csv::Reader::from_reader(r);
    let expected = header();
    let got: Vec<String> = rdr.headers().map_err(csv_err)?.iter().map(str::to_string).collect();
    if got != expected {
        return Err(Error::Format(format!("unexpected feature header: {}", got.join(","))));
    }
    let mut out: Vec<HandFeatureVector> = Vec::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        let row = line + 2;
        let hand: Hand = rec[2].parse()?;
        let finger = FINGER_NAMES
            .iter()
            .position(|&n| n == &rec[3])
            .ok_or_else(|| Error::Format(format!("row {row}: unknown finger `{}`", &rec[3])))?;
        let values = rec
            .iter()
            .skip(4)
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Format(format!("row {row}: bad number `{s}`")))
            })
            .collect::<Result<Vec<f64>>>()?;
        if values.len() != FEATURES_PER_FINGER {
            return Err(Error::Format(format!(
                "row {row}: expected {FEATURES_PER_FINGER} values"
            )));
        }
        let f = FingerFeatures::from_values(&values)?;
        let same = out.last().is_some_and(|v| {
            v.subject == rec[0] && v.sample == rec[1] && v.hand == hand && v.fingers.len() < FINGER_NAMES.len()
        });
        if finger == 0 && !same {
            out.push(HandFeatureVector {
                subject: rec[0].to_string(),
                sample: rec[1].to_string(),
                hand,
                fingers: vec![f],
            });
        } else if same && out.last().map(|v| v.fingers.len()) == Some(finger) {
            out.last_mut().expect("checked").fingers.push(f);
        } else {
            return Err(Error::Format(format!("row {row}: finger `{}` out of order", &rec[3])));
        }
    }
    if let Some(v) = out.iter().find(|v| v.fingers.len() != FINGER_NAMES.len()) {
        return Err(Error::Format(format!(
            "subject {} sample {} has {} fingers",
            v.subject,
            v.sample,
            v.fingers.len()
        )));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vector(subject: &str, base: f64) -> HandFeatureVector {
        let f = |k: usize| {
            FingerFeatures::from_values(&(0..30).map(|i| base + k as f64 + i as f64 / 7.0).collect::<Vec<_>>()).unwrap()
        };
        HandFeatureVector {
            subject: subject.into(),
            sample: "s0".into(),
            hand: Hand::Right,
            fingers: (0..5).map(f).collect(),
        }
    }

    fn rounded(v: &HandFeatureVector) -> HandFeatureVector {
        let mut r = v.clone();
        for f in &mut r.fingers {
            let vals: Vec<f64> = f.values().map(|x| format!("{x:.6}").parse().unwrap()).collect();
            *f = FingerFeatures::from_values(&vals).unwrap();
        }
        r
    }

    #[test]
    fn round_trip_at_six_decimals() {
        let vs = vec![vector("7", 1.0), vector("subject, with comma", 2.5)];
        let mut buf = Vec::new();
        write_features(&mut buf, &vs).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("subject,sample,hand,finger,a1,a2,"));
        assert!(text.lines().next().unwrap().ends_with(",c9,c10"));
        assert_eq!(text.lines().count(), 1 + 10);
        assert!(text.contains("right,thumb,1.000000,1.142857"));
        let back = read_features(buf.as_slice()).unwrap();
        assert_eq!(back, vs.iter().map(rounded).collect::<Vec<_>>());
    }

    #[test]
    fn incomplete_or_shuffled_hands_are_rejected() {
        let mut buf = Vec::new();
        write_features(&mut buf, &[vector("1", 0.0)]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        let short = lines[..5].join("\n");
        assert!(read_features(short.as_bytes()).is_err());
        let mut swapped = lines.clone();
        swapped.swap(2, 3);
        assert!(read_features(swapped.join("\n").as_bytes()).is_err());
        assert!(read_features("a,b\n1,2\n".as_bytes()).is_err());
    }
}
