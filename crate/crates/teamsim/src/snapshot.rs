//! Versioned binary snapshots of a fragmentation and its index.
//!
//! The layout is described in `docs/snapshot-format.md`. All integers are
//! little-endian.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use teamsim_core::fragment::{FragmentError, Fragmentation};
use teamsim_core::index::{BallFilter, BallRecord, BallStatus, IndexError, RecordedUpdate, TypeCode, UpdatePlanner};
use teamsim_core::{Capacity, Density, IncIndex, LabelId, MatchRelation, NodeId, PNodeId, PatternGraph, PatternUpdate};

pub const MAGIC: &[u8; 4] = b"TSIX";
pub const VERSION: u32 = 1;
const UNBOUNDED: u32 = u32::MAX;

#[derive(Debug, thiserror::Error)]
pub enum SnapshotError {
    #[error("not a snapshot file")]
    BadMagic,
    #[error("unsupported snapshot version {0}")]
    Version(u32),
    #[error("snapshot truncated at byte {0}")]
    Truncated(usize),
    #[error("malformed snapshot at byte {offset}: {message}")]
    Malformed { offset: usize, message: String },
    #[error(transparent)]
    Fragment(#[from] FragmentError),
    #[error(transparent)]
    Index(#[from] IndexError),
}

struct Writer(Vec<u8>);

impl Writer {
    fn u8(&mut self, v: u8) {
        self.0.push(v);
    }
    fn u32(&mut self, v: u32) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn u64(&mut self, v: u64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn len(&mut self, v: usize) {
        self.u32(u32::try_from(v).expect("section fits u32 counts"));
    }
    fn tag(&mut self, t: &[u8; 4]) {
        self.0.extend_from_slice(t);
    }
    fn capacity(&mut self, c: Capacity) {
        self.u32(c.lower());
        self.u32(c.upper().unwrap_or(UNBOUNDED));
    }
    fn update(&mut self, u: &PatternUpdate) {
        match u {
            PatternUpdate::InsertEdge(a, b) => {
                self.u8(0);
                self.u32(a.0);
                self.u32(b.0);
            }
            PatternUpdate::DeleteEdge(a, b) => {
                self.u8(1);
                self.u32(a.0);
                self.u32(b.0);
            }
            PatternUpdate::InsertNode {
                node,
                name,
                label,
                capacity,
                anchor,
            } => {
                self.u8(2);
                self.u32(node.0);
                self.u32(anchor.0);
                self.u32(label.0);
                self.capacity(*capacity);
                self.len(name.len());
                self.0.extend_from_slice(name.as_bytes());
            }
            PatternUpdate::DeleteNode(v) => {
                self.u8(3);
                self.u32(v.0);
            }
            PatternUpdate::SetCapacity(v, c) => {
                self.u8(4);
                self.u32(v.0);
                self.capacity(*c);
            }
        }
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], SnapshotError> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.bytes.len()).ok_or(SnapshotError::Truncated(self.pos))?;
        let out = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(out)
    }
    fn u8(&mut self) -> Result<u8, SnapshotError> {
        Ok(self.take(1)?[0])
    }
    fn u32(&mut self) -> Result<u32, SnapshotError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }
    fn u64(&mut self) -> Result<u64, SnapshotError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }
    fn malformed(&self, message: impl Into<String>) -> SnapshotError {
        SnapshotError::Malformed {
            offset: self.pos,
            message: message.into(),
        }
    }
    fn count(&mut self) -> Result<usize, SnapshotError> {
        let n = self.u32()? as usize;
        if n > self.bytes.len() - self.pos {
            return Err(self.malformed(format!("count {n} exceeds the remaining input")));
        }
        Ok(n)
    }
    fn tag(&mut self, t: &[u8; 4]) -> Result<(), SnapshotError> {
        if self.take(4)? != t {
            return Err(self.malformed(format!("expected section {}", String::from_utf8_lossy(t).trim_end())));
        }
        Ok(())
    }
    fn capacity(&mut self) -> Result<Capacity, SnapshotError> {
        let lower = self.u32()?;
        let upper = match self.u32()? {
            UNBOUNDED => None,
            y => Some(y),
        };
        Capacity::new(lower, upper).map_err(|e| self.malformed(e.to_string()))
    }
    fn update(&mut self) -> Result<PatternUpdate, SnapshotError> {
        Ok(match self.u8()? {
            0 => PatternUpdate::InsertEdge(PNodeId(self.u32()?), PNodeId(self.u32()?)),
            1 => PatternUpdate::DeleteEdge(PNodeId(self.u32()?), PNodeId(self.u32()?)),
            2 => {
                let node = PNodeId(self.u32()?);
                let anchor = PNodeId(self.u32()?);
                let label = LabelId(self.u32()?);
                let capacity = self.capacity()?;
                let len = self.count()?;
                let name = std::str::from_utf8(self.take(len)?)
                    .map_err(|_| self.malformed("node name is not UTF-8"))?
                    .to_string();
                PatternUpdate::InsertNode {
                    node,
                    name,
                    label,
                    capacity,
                    anchor,
                }
            }
            3 => PatternUpdate::DeleteNode(PNodeId(self.u32()?)),
            4 => PatternUpdate::SetCapacity(PNodeId(self.u32()?), self.capacity()?),
            t => return Err(self.malformed(format!("unknown update tag {t}"))),
        })
    }
}

/// Serializes a fragmentation and index.
pub fn write_snapshot(fragmentation: &Fragmentation, index: &IncIndex) -> Vec<u8> {
    let h = index.h();
    let mut w = Writer(Vec::new());
    w.tag(MAGIC);
    w.u32(VERSION);
    w.len(h);
    w.u32(index.radius());

    w.tag(b"FS  ");
    let mut assignment: Vec<(PNodeId, usize)> = fragmentation
        .fragments()
        .into_iter()
        .enumerate()
        .flat_map(|(i, nodes)| nodes.into_iter().map(move |u| (u, i)))
        .collect();
    assignment.sort();
    w.len(assignment.len());
    for (u, i) in assignment {
        w.u32(u.0);
        w.len(i);
    }

    let records: Vec<&BallRecord> = index.fbm().records().collect();
    w.tag(b"BS  ");
    w.len(records.len());
    for r in &records {
        w.u32(r.status.center.0);
        w.u64(r.status.cflag);
        w.u64(r.status.den.edges());
        w.u64(r.status.den.nodes());
        w.u32(r.status.type_code.0);
    }

    w.tag(b"MT  ");
    for r in &records {
        for rel in &r.relations {
            match rel {
                None => w.u8(0),
                Some(m) => {
                    w.u8(1);
                    w.len(m.pattern_nodes().count());
                    for (u, vs) in m.iter() {
                        w.u32(u.0);
                        w.len(vs.len());
                        for v in vs {
                            w.u32(v.0);
                        }
                    }
                }
            }
        }
    }

    w.tag(b"BF  ");
    w.len(index.filter().codes().len());
    for &c in index.filter().codes() {
        w.u32(c);
    }

    w.tag(b"UP  ");
    w.u64(index.planner().latest());
    w.len(index.planner().stacks().len());
    for stack in index.planner().stacks() {
        w.len(stack.len());
        for e in stack {
            w.u64(e.id);
            w.update(&e.update);
        }
    }
    w.0
}

/// Reads a snapshot taken for `pattern`.
pub fn read_snapshot(bytes: &[u8], pattern: &PatternGraph) -> Result<(Fragmentation, IncIndex), SnapshotError> {
    let mut r = Reader { bytes, pos: 0 };
    if r.take(4).map_err(|_| SnapshotError::BadMagic)? != MAGIC {
        return Err(SnapshotError::BadMagic);
    }
    let version = r.u32()?;
    if version != VERSION {
        return Err(SnapshotError::Version(version));
    }
    let h = r.u32()? as usize;
    if h == 0 || h > teamsim_core::fragment::MAX_FRAGMENTS {
        return Err(r.malformed(format!("fragment count {h}")));
    }
    let radius = r.u32()?;

    r.tag(b"FS  ")?;
    let mut assignment = BTreeMap::new();
    for _ in 0..r.count()? {
        let u = PNodeId(r.u32()?);
        let i = r.u32()? as usize;
        assignment.insert(u, i);
    }
    let fragmentation = Fragmentation::from_assignment(pattern, h, assignment)?;

    r.tag(b"BS  ")?;
    let mut statuses = Vec::new();
    for _ in 0..r.count()? {
        let center = NodeId(r.u32()?);
        let cflag = r.u64()?;
        let e = r.u64()?;
        let n = r.u64()?;
        if n == 0 {
            return Err(r.malformed("ball density with zero nodes"));
        }
        let type_code = TypeCode(r.u32()?);
        statuses.push(BallStatus {
            center,
            cflag,
            den: Density::new(e, n),
            type_code,
        });
    }

    r.tag(b"MT  ")?;
    let mut records = Vec::with_capacity(statuses.len());
    for status in statuses {
        let mut relations = Vec::with_capacity(h);
        for _ in 0..h {
            relations.push(match r.u8()? {
                0 => None,
                1 => {
                    let mut sets = Vec::new();
                    for _ in 0..r.count()? {
                        let u = PNodeId(r.u32()?);
                        let mut vs = Vec::new();
                        for _ in 0..r.count()? {
                            vs.push(NodeId(r.u32()?));
                        }
                        sets.push((u, vs));
                    }
                    Some(MatchRelation::from_sets(sets))
                }
                t => return Err(r.malformed(format!("relation tag {t}"))),
            });
        }
        records.push(BallRecord { status, relations });
    }

    r.tag(b"BF  ")?;
    let mut codes = Vec::new();
    for _ in 0..r.count()? {
        codes.push(r.u32()?);
    }
    let filter = BallFilter::from_codes(h, codes)?;

    r.tag(b"UP  ")?;
    let latest = r.u64()?;
    let mut stacks = Vec::new();
    for _ in 0..r.count()? {
        let mut stack = Vec::new();
        for _ in 0..r.count()? {
            let id = r.u64()?;
            stack.push(RecordedUpdate { id, update: r.update()? });
        }
        stacks.push(stack);
    }
    let planner = UpdatePlanner::from_parts(latest, stacks)?;
    if r.pos != bytes.len() {
        return Err(r.malformed("trailing bytes"));
    }
    let index = IncIndex::from_parts(radius, records, filter, planner)?;
    Ok((fragmentation, index))
}

/// Human-readable dump of the same content.
pub fn dump_text(fragmentation: &Fragmentation, index: &IncIndex) -> String {
    let mut out = String::new();
    writeln!(out, "h {} radius {}", index.h(), index.radius()).unwrap();
    for (i, nodes) in fragmentation.fragments().iter().enumerate() {
        let names: Vec<String> = nodes.iter().map(|u| u.to_string()).collect();
        writeln!(out, "fragment {i}: {}", names.join(" ")).unwrap();
    }
    let cut: Vec<String> = fragmentation.cut().iter().map(|(a, b)| format!("{a}-{b}")).collect();
    writeln!(out, "cut: {}", cut.join(" ")).unwrap();
    for rec in index.fbm().records() {
        let s = &rec.status;
        write!(out, "ball {} cflag {} den {} type {:0w$b}", s.center, s.cflag, s.den, s.type_code.0, w = index.h()).unwrap();
        for (i, rel) in rec.relations.iter().enumerate() {
            match rel {
                None => write!(out, " | f{i} none").unwrap(),
                Some(m) => write!(out, " | f{i} {} pairs", m.pair_count()).unwrap(),
            }
        }
        out.push('\n');
    }
    let codes: Vec<String> = index.filter().codes().iter().map(|c| format!("{c:0w$b}", w = index.h())).collect();
    writeln!(out, "filter {}", codes.join(" ")).unwrap();
    writeln!(out, "planner latest {}", index.planner().latest()).unwrap();
    for (i, stack) in index.planner().stacks().iter().enumerate() {
        let ids: Vec<String> = stack.iter().map(|e| e.id.to_string()).collect();
        writeln!(out, "stack {i}: {}", ids.join(" ")).unwrap();
    }
    out
}
