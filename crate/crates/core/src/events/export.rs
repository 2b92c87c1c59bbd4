use std::io::Write;

use super::EventRecord;

/// One JSON object per line.
pub fn write_events_jsonl<W: Write>(events: &[EventRecord], mut w: W) -> std::io::Result<()> {
    for e in events {
        serde_json::to_writer(&mut w, e)?;
        w.write_all(b"\n")?;
    }
    w.flush()
}

pub fn write_events_csv<W: Write>(events: &[EventRecord], w: W) -> Result<(), csv::Error> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record([
        "kind",
        "prefix",
        "expected_origin",
        "observed_origin",
        "t_start",
        "t_end",
        "country",
    ])?;
    let opt = |x: Option<String>| x.unwrap_or_default();
    for e in events {
        wr.write_record([
            e.kind.to_string(),
            e.prefix.to_string(),
            opt(e.expected_origin.map(|a| a.to_string())),
            opt(e.observed_origin.map(|a| a.to_string())),
            e.t_start.to_string(),
            opt(e.t_end.map(|t| t.to_string())),
            e.country.to_string(),
        ])?;
    }
    wr.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::events::EventKind;
    use crate::ingest::{Asn, CountryCode};

    fn ev() -> EventRecord {
        EventRecord {
            t_start: 10,
            kind: EventKind::MoasHijack,
            prefix: "10.0.0.0/24".parse().unwrap(),
            expected_origin: Some(Asn(1)),
            observed_origin: Some(Asn(2)),
            t_end: None,
            country: "IR".parse::<CountryCode>().unwrap(),
        }
    }

    #[test]
    fn jsonl_line() {
        let mut buf = Vec::new();
        write_events_jsonl(&[ev(), ev()], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 2);
        let v: serde_json::Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
        assert_eq!(v["kind"], "moas_hijack");
        assert_eq!(v["prefix"], "10.0.0.0/24");
        assert_eq!(v["observed_origin"], 2);
        assert!(v["t_end"].is_null());
    }

    #[test]
    fn csv_rows() {
        let mut buf = Vec::new();
        write_events_csv(&[ev()], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().nth(1).unwrap(), "moas_hijack,10.0.0.0/24,1,2,10,,IR");
    }
}
