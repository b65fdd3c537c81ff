//! CSV formats: datasets, microclustering indexes, mined patterns and
//! planted ground truth.
//!
//! Dataset files carry the header `id,type,x,t` (one spatial axis) or
//! `id,type,x,y,t` (two). Index files carry
//! `cid,event_type,count,rep_x[,rep_y],rep_t,member_ids` with member ids
//! joined by `;`. Pattern files carry `pattern,length,seq_index,tail_size`.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::microcluster::{BuildParams, MicroclusterIndex};
use crate::miner::PatternResult;
use crate::model::{EmbeddingSpace, EventDataset, EventInstance};

pub(crate) fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub(crate) fn create(path: &Path) -> Result<File> {
    File::create(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub(crate) fn record_line(record: &csv::StringRecord) -> u64 {
    record.position().map_or(0, |p| p.line())
}

pub(crate) fn parse_err(source: &Path, line: u64, message: impl Into<String>) -> Error {
    Error::Parse {
        path: source.to_path_buf(),
        line,
        message: message.into(),
    }
}

pub(crate) fn parse_f64(source: &Path, line: u64, field: &str, value: &str) -> Result<f64> {
    match value.trim().parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(parse_err(source, line, format!("{field}: not a finite number: {value:?}"))),
    }
}

/// Reads a dataset CSV. The spatial dimensionality comes from the header.
/// The embedding space is the bounding box of the instances unless `space`
/// is given.
pub fn read_dataset(path: impl AsRef<Path>, space: Option<EmbeddingSpace>) -> Result<EventDataset> {
    let path = path.as_ref();
    parse_dataset(open(path)?, path, space)
}

pub fn parse_dataset<R: Read>(
    reader: R,
    source: &Path,
    space: Option<EmbeddingSpace>,
) -> Result<EventDataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_owned).collect();
    let dim = match header.iter().map(String::as_str).collect::<Vec<_>>()[..] {
        ["id", "type", "x", "t"] => 1,
        ["id", "type", "x", "y", "t"] => 2,
        _ => {
            return Err(parse_err(
                source,
                1,
                format!("unknown header {:?}; expected id,type,x[,y],t", header.join(",")),
            ))
        }
    };

    let mut instances = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            parse_err(source, line, e.to_string())
        })?;
        let line = record_line(&record);
        let id = &record[0];
        if id.is_empty() {
            return Err(parse_err(source, line, "empty instance id"));
        }
        let location: Vec<f64> = (0..dim)
            .map(|k| parse_f64(source, line, &header[2 + k], &record[2 + k]))
            .collect::<Result<_>>()?;
        let time = parse_f64(source, line, "t", &record[2 + dim])?;
        instances.push(EventInstance::new(id, &record[1], &location, time));
    }

    let dataset = EventDataset::from_instances(dim, instances)?;
    match space {
        Some(space) => dataset.with_space(space),
        None => Ok(dataset),
    }
}

pub fn write_dataset(path: impl AsRef<Path>, dataset: &EventDataset) -> Result<()> {
    let path = path.as_ref();
    write_dataset_to(create(path)?, dataset)
}

pub fn write_dataset_to<W: Write>(writer: W, dataset: &EventDataset) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    if dataset.dim() == 1 {
        w.write_record(["id", "type", "x", "t"])?;
    } else {
        w.write_record(["id", "type", "x", "y", "t"])?;
    }
    for e in dataset.instances() {
        let mut row = vec![e.id.clone(), e.event_type.clone()];
        row.extend(e.location.iter().map(f64::to_string));
        row.push(e.time.to_string());
        w.write_record(&row)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn write_index(path: impl AsRef<Path>, index: &MicroclusterIndex, dataset: &EventDataset) -> Result<()> {
    let path = path.as_ref();
    write_index_to(create(path)?, index, dataset)
}

pub fn write_index_to<W: Write>(writer: W, index: &MicroclusterIndex, dataset: &EventDataset) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec!["cid", "event_type", "count", "rep_x"];
    if index.dim() == 2 {
        header.push("rep_y");
    }
    header.extend(["rep_t", "member_ids"]);
    w.write_record(&header)?;
    for c in index.clusters() {
        let mut row = vec![c.cid.to_string(), c.event_type.clone(), c.count().to_string()];
        row.extend(c.rep_location.iter().map(f64::to_string));
        row.push(c.rep_time.to_string());
        row.push(c.member_ids(dataset).collect::<Vec<_>>().join(";"));
        w.write_record(&row)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Reads an index CSV against the dataset it was built from. Representatives
/// are recomputed from the members; cids are reassigned in type order.
pub fn read_index(path: impl AsRef<Path>, dataset: &EventDataset, params: BuildParams) -> Result<MicroclusterIndex> {
    let path = path.as_ref();
    parse_index(open(path)?, path, dataset, params)
}

pub fn parse_index<R: Read>(
    reader: R,
    source: &Path,
    dataset: &EventDataset,
    params: BuildParams,
) -> Result<MicroclusterIndex> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_owned).collect();
    let expected: &[&str] = if dataset.dim() == 1 {
        &["cid", "event_type", "count", "rep_x", "rep_t", "member_ids"]
    } else {
        &["cid", "event_type", "count", "rep_x", "rep_y", "rep_t", "member_ids"]
    };
    if header != expected {
        return Err(parse_err(
            source,
            1,
            format!("unknown header {:?}; expected {:?}", header.join(","), expected.join(",")),
        ));
    }
    let by_id: HashMap<&str, usize> = dataset
        .instances()
        .iter()
        .enumerate()
        .map(|(i, e)| (e.id.as_str(), i))
        .collect();

    let mut rows: Vec<(usize, usize, Vec<usize>)> = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let line = record_line(&record);
        let cid: usize = record[0]
            .parse()
            .map_err(|_| parse_err(source, line, format!("bad cid {:?}", &record[0])))?;
        let t = dataset
            .type_index(&record[1])
            .ok_or_else(|| parse_err(source, line, format!("unknown event type {:?}", &record[1])))?;
        let count: usize = record[2]
            .parse()
            .map_err(|_| parse_err(source, line, format!("bad count {:?}", &record[2])))?;
        let members: Vec<usize> = record[header.len() - 1]
            .split(';')
            .filter(|s| !s.is_empty())
            .map(|id| {
                by_id
                    .get(id)
                    .copied()
                    .ok_or_else(|| parse_err(source, line, format!("unknown instance {id:?}")))
            })
            .collect::<Result<_>>()?;
        if members.len() != count {
            return Err(parse_err(
                source,
                line,
                format!("count {count} but {} members listed", members.len()),
            ));
        }
        rows.push((cid, t, members));
    }
    rows.sort_by_key(|r| (r.1, r.0));
    let mut groups = vec![Vec::new(); dataset.event_types().len()];
    for (_, t, members) in rows {
        groups[t].push(members);
    }
    MicroclusterIndex::from_groups(dataset, groups, params)
}

pub fn write_patterns(path: impl AsRef<Path>, patterns: &[PatternResult]) -> Result<()> {
    let path = path.as_ref();
    write_patterns_to(create(path)?, patterns)
}

pub fn write_patterns_to<W: Write>(writer: W, patterns: &[PatternResult]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["pattern", "length", "seq_index", "tail_size"])?;
    for p in patterns {
        w.write_record([
            p.types.join(";"),
            p.types.len().to_string(),
            p.index_value.to_string(),
            p.tail_size.to_string(),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Reads a pattern CSV back into `(types, seq_index, tail_size)` rows.
pub fn read_patterns(path: impl AsRef<Path>) -> Result<Vec<(Vec<String>, f64, usize)>> {
    let path = path.as_ref();
    let mut rdr = csv::Reader::from_reader(open(path)?);
    let mut out = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let line = record_line(&record);
        let types = record[0].split(';').map(str::to_owned).collect();
        let index = parse_f64(path, line, "seq_index", &record[2])?;
        let tail = record[3]
            .parse()
            .map_err(|_| parse_err(path, line, "bad tail_size"))?;
        out.push((types, index, tail));
    }
    Ok(out)
}

/// One `;`-joined type sequence per line.
pub fn write_planted(path: impl AsRef<Path>, planted: &[Vec<String>]) -> Result<()> {
    let path = path.as_ref();
    let mut f = create(path)?;
    for seq in planted {
        writeln!(f, "{}", seq.join(";")).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
    }
    Ok(())
}

pub fn read_planted(path: impl AsRef<Path>) -> Result<Vec<Vec<String>>> {
    let path = path.as_ref();
    let reader = BufReader::new(open(path)?);
    let mut out = Vec::new();
    for line in reader.lines() {
        let line = line.map_err(|source| Error::Io {
            path: PathBuf::from(path),
            source,
        })?;
        let line = line.trim();
        if !line.is_empty() {
            out.push(line.split(';').map(str::to_owned).collect());
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::microcluster::build_index;
    use crate::model::NormalizationParams;
    use proptest::prelude::*;

    fn parse(text: &str) -> Result<EventDataset> {
        parse_dataset(text.as_bytes(), Path::new("mem.csv"), None)
    }

    #[test]
    fn reads_a_table_row() {
        let ds = parse("id,type,x,t\na1,A,19,1\n").unwrap();
        assert_eq!(ds.dim(), 1);
        let e = &ds.instances()[0];
        assert_eq!((e.id.as_str(), e.event_type.as_str()), ("a1", "A"));
        assert_eq!(e.location, [19.0]);
        assert_eq!(e.time, 1.0);
    }

    #[test]
    fn header_only_gives_empty_dataset() {
        let ds = parse("id,type,x,y,t\n").unwrap();
        assert!(ds.is_empty());
        assert_eq!(ds.dim(), 2);
    }

    #[test]
    fn bad_number_names_the_line() {
        let err = parse("id,type,x,t\na1,A,19,1\na2,A,abc,1\n").unwrap_err();
        match err {
            Error::Parse { line, message, .. } => {
                assert_eq!(line, 3);
                assert!(message.contains("abc"), "{message}");
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse("id,type,x,z\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse("id,type,x,t\na,A,1\n"), Err(Error::Parse { .. })));
        assert!(matches!(parse("id,type,x,t\na,A,inf,1\n"), Err(Error::Parse { .. })));
    }

    #[test]
    fn index_round_trips_through_csv() {
        let ds = crate::sample::worked_example();
        let index = build_index(&ds, 20.0, NormalizationParams::IDENTITY).unwrap();
        let mut buf = Vec::new();
        write_index_to(&mut buf, &index, &ds).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("cid,event_type,count,rep_x,rep_t,member_ids\n"));
        let back = parse_index(buf.as_slice(), Path::new("mem"), &ds, *index.params()).unwrap();
        assert_eq!(back.clusters(), index.clusters());
    }

    fn instance() -> impl Strategy<Value = (String, f64, f64, f64)> {
        ("[A-D]", -1e6..1e6f64, -1e6..1e6f64, -1e6..1e6f64)
    }

    proptest! {
        #[test]
        fn dataset_round_trips_through_csv(dim in 1usize..=2, rows in prop::collection::vec(instance(), 0..40)) {
            let instances: Vec<EventInstance> = rows
                .iter()
                .enumerate()
                .map(|(i, (ty, x, y, t))| {
                    let loc = if dim == 1 { vec![*x] } else { vec![*x, *y] };
                    EventInstance::new(format!("e{i}"), ty.as_str(), &loc, *t)
                })
                .collect();
            let ds = EventDataset::from_instances(dim, instances).unwrap();
            let mut buf = Vec::new();
            write_dataset_to(&mut buf, &ds).unwrap();
            let back = parse_dataset(buf.as_slice(), Path::new("mem"), None).unwrap();
            prop_assert_eq!(back.instances(), ds.instances());
            prop_assert_eq!(back.event_types(), ds.event_types());
            prop_assert_eq!(back.space(), ds.space());
        }
    }
}
