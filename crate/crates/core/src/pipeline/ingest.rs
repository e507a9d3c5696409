//! Market CSV reading and writing.

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::techno::{Commodity, Region};

/// Header of the market file, in order.
pub const MARKET_COLUMNS: [&str; 13] = [
    "market_id",
    "railroad",
    "region",
    "commodity_group",
    "distance_mi",
    "annual_demand_cars",
    "train_length_cars",
    "num_locomotives",
    "speed_mph",
    "t0_h",
    "alpha",
    "gross_tons",
    "h_override",
];

/// One origin-destination market.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarketRecord {
    pub market_id: String,
    pub railroad: String,
    pub region: Region,
    pub commodity: Commodity,
    /// miles
    pub distance: f64,
    /// cars/year
    pub annual_demand: f64,
    /// cars per train
    pub train_length: f64,
    pub locomotives: u32,
    /// mph; used for the trip time when `nominal_time` is absent
    pub speed: Option<f64>,
    /// hours
    pub nominal_time: Option<f64>,
    pub alpha: f64,
    /// Gross tons per train.
    pub gross_tons: Option<f64>,
    /// USD per car-hour, replaces the train-type lookup.
    pub h_override: Option<f64>,
    /// Free-form labels, read when the file has these columns.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub origin: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub destination: Option<String>,
}

struct RowReader<'a> {
    line: usize,
    record: &'a csv::StringRecord,
    index: &'a [usize; 13],
}

impl RowReader<'_> {
    fn err(&self, column: &str, message: impl Into<String>) -> Error {
        Error::Ingest {
            row: self.line,
            column: column.to_string(),
            message: message.into(),
        }
    }

    fn raw(&self, col: usize) -> &str {
        self.record.get(self.index[col]).unwrap_or("").trim()
    }

    fn text(&self, col: usize) -> Result<String> {
        let v = self.raw(col);
        if v.is_empty() {
            return Err(self.err(MARKET_COLUMNS[col], "required value is empty"));
        }
        Ok(v.to_string())
    }

    fn optional(&self, col: usize) -> Result<Option<f64>> {
        let v = self.raw(col);
        if v.is_empty() {
            return Ok(None);
        }
        let x: f64 = v
            .parse()
            .map_err(|_| self.err(MARKET_COLUMNS[col], format!("cannot parse `{v}` as a number")))?;
        if !x.is_finite() {
            return Err(self.err(MARKET_COLUMNS[col], format!("must be finite, got {v}")));
        }
        Ok(Some(x))
    }

    fn required(&self, col: usize) -> Result<f64> {
        self.optional(col)?
            .ok_or_else(|| self.err(MARKET_COLUMNS[col], "required value is empty"))
    }

    fn positive(&self, col: usize) -> Result<f64> {
        let x = self.required(col)?;
        if x <= 0.0 {
            return Err(self.err(MARKET_COLUMNS[col], format!("must be > 0, got {x}")));
        }
        Ok(x)
    }
}

/// Parses market rows from CSV text. Rows are reported by file line (the header is line 1).
pub fn parse_markets<R: Read>(input: R) -> Result<Vec<MarketRecord>> {
    let mut reader = csv::ReaderBuilder::new().flexible(false).from_reader(input);
    let headers = reader.headers()?.clone();
    let find = |name: &str| headers.iter().position(|h| h.trim() == name);
    let mut index = [0usize; 13];
    for (i, name) in MARKET_COLUMNS.iter().enumerate() {
        index[i] = find(name).ok_or_else(|| Error::Ingest {
            row: 1,
            column: name.to_string(),
            message: "missing column in header".into(),
        })?;
    }
    let origin = find("origin");
    let destination = find("destination");

    let mut out = Vec::new();
    let mut record = csv::StringRecord::new();
    loop {
        let line = reader.position().line() as usize;
        if !reader.read_record(&mut record)? {
            break;
        }
        let line = record.position().map(|p| p.line() as usize).unwrap_or(line);
        let row = RowReader {
            line,
            record: &record,
            index: &index,
        };
        let region: Region = row
            .text(2)?
            .parse()
            .map_err(|e: Error| row.err("region", e.to_string()))?;
        let commodity: Commodity = row
            .text(3)?
            .parse()
            .map_err(|e: Error| row.err("commodity_group", e.to_string()))?;
        let locos = row.positive(7)?;
        if locos.fract() != 0.0 || locos > u32::MAX as f64 {
            return Err(row.err("num_locomotives", format!("must be a whole number >= 1, got {locos}")));
        }
        let speed = row.optional(8)?;
        let nominal_time = row.optional(9)?;
        match (speed, nominal_time) {
            (Some(_), Some(_)) => {
                return Err(row.err("speed_mph", "both speed_mph and t0_h are given; supply exactly one"))
            }
            (None, None) => return Err(row.err("speed_mph", "neither speed_mph nor t0_h is given; supply exactly one")),
            (Some(s), None) if s <= 0.0 => return Err(row.err("speed_mph", format!("must be > 0, got {s}"))),
            (None, Some(t)) if t < 0.0 => return Err(row.err("t0_h", format!("must be >= 0, got {t}"))),
            _ => {}
        }
        let gross_tons = row.optional(11)?;
        if let Some(g) = gross_tons {
            if g <= 0.0 {
                return Err(row.err("gross_tons", format!("must be > 0, got {g}")));
            }
        }
        let h_override = row.optional(12)?;
        if let Some(h) = h_override {
            if h < 0.0 {
                return Err(row.err("h_override", format!("must be >= 0, got {h}")));
            }
        }
        let label = |col: Option<usize>| {
            col.and_then(|c| record.get(c))
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(String::from)
        };
        out.push(MarketRecord {
            market_id: row.text(0)?,
            railroad: row.text(1)?,
            region,
            commodity,
            distance: row.positive(4)?,
            annual_demand: row.positive(5)?,
            train_length: row.positive(6)?,
            locomotives: locos as u32,
            speed,
            nominal_time,
            alpha: row.positive(10)?,
            gross_tons,
            h_override,
            origin: label(origin),
            destination: label(destination),
        });
    }
    Ok(out)
}

pub fn ingest_markets(path: impl AsRef<Path>) -> Result<Vec<MarketRecord>> {
    parse_markets(std::fs::File::open(path)?)
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Writes records under the standard header; `parse_markets` reads them back unchanged
/// (origin and destination labels are not written).
pub fn write_markets<W: Write>(out: W, records: &[MarketRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(MARKET_COLUMNS)?;
    for r in records {
        w.write_record([
            r.market_id.clone(),
            r.railroad.clone(),
            r.region.key().to_string(),
            r.commodity.key().to_string(),
            r.distance.to_string(),
            r.annual_demand.to_string(),
            r.train_length.to_string(),
            r.locomotives.to_string(),
            opt(r.speed),
            opt(r.nominal_time),
            r.alpha.to_string(),
            opt(r.gross_tons),
            opt(r.h_override),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEADER: &str = "market_id,railroad,region,commodity_group,distance_mi,annual_demand_cars,train_length_cars,num_locomotives,speed_mph,t0_h,alpha,gross_tons,h_override\n";

    #[test]
    fn three_rows() {
        let text = format!(
            "{HEADER}a,BNSF,western,coal,1400,1000,73,5,,70.7,1.3,,\n\
             b,UP,Western,intermodal,2300,1500,118,1,31.6,,10.4,1600,32\n\
             c,CSX,eastern,Metals & Ores,600,400,80,2,20,,1.5,,\n"
        );
        let rows = parse_markets(text.as_bytes()).unwrap();
        assert_eq!(rows.len(), 3);
        assert_eq!(rows[0].nominal_time, Some(70.7));
        assert_eq!(rows[1].h_override, Some(32.0));
        assert_eq!(rows[2].commodity, Commodity::MetalsOres);
        let mut buf = Vec::new();
        write_markets(&mut buf, &rows).unwrap();
        assert_eq!(parse_markets(buf.as_slice()).unwrap(), rows);
    }

    #[test]
    fn both_speed_and_time_rejected() {
        let text = format!("{HEADER}a,BNSF,western,coal,1400,1000,73,5,20,70.7,1.3,,\n");
        let err = parse_markets(text.as_bytes()).unwrap_err().to_string();
        assert!(err.contains("row 2") && err.contains("both speed_mph and t0_h"), "{err}");
    }

    #[test]
    fn diagnostics_name_row_and_column() {
        let text = format!(
            "{HEADER}a,BNSF,western,coal,1400,1000,73,5,,70.7,1.3,,\nb,BNSF,western,coal,abc,1000,73,5,,70.7,1.3,,\n"
        );
        let err = parse_markets(text.as_bytes()).unwrap_err().to_string();
        assert!(err.contains("row 3") && err.contains("distance_mi"), "{err}");

        let missing = "market_id,railroad\n";
        let err = parse_markets(missing.as_bytes()).unwrap_err().to_string();
        assert!(err.contains("region"), "{err}");

        let zero = format!("{HEADER}a,BNSF,western,coal,1400,0,73,5,,70.7,1.3,,\n");
        let err = parse_markets(zero.as_bytes()).unwrap_err().to_string();
        assert!(err.contains("annual_demand_cars"), "{err}");

        let frac = format!("{HEADER}a,BNSF,western,coal,1400,10,73,2.5,,70.7,1.3,,\n");
        let err = parse_markets(frac.as_bytes()).unwrap_err().to_string();
        assert!(err.contains("num_locomotives"), "{err}");

        let bad_group = format!("{HEADER}a,BNSF,western,lumber,1400,10,73,2,,70.7,1.3,,\n");
        let err = parse_markets(bad_group.as_bytes()).unwrap_err().to_string();
        assert!(err.contains("commodity_group") && err.contains("forest_products"), "{err}");
    }

    #[test]
    fn extra_label_columns() {
        let text = "origin,market_id,railroad,region,commodity_group,distance_mi,annual_demand_cars,train_length_cars,num_locomotives,speed_mph,t0_h,alpha,gross_tons,h_override,destination\n\
                    PRB,a,BNSF,western,coal,1400,1000,73,5,,70.7,1.3,,,Chicago\n";
        let rows = parse_markets(text.as_bytes()).unwrap();
        assert_eq!(rows[0].origin.as_deref(), Some("PRB"));
        assert_eq!(rows[0].destination.as_deref(), Some("Chicago"));
    }
}
