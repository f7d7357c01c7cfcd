//! `LSK1` binary sketch files.
//!
//! Little-endian throughout. Layout:
//!
//! ```text
//! "LSK1" | u32 version | u8 algorithm | f64 ε, δ, c_α, c_β, c_med
//!        | u64 seed | u64 n | u32 replicas
//!        | replica sections ... | footer section
//! ```
//!
//! Every section is a `u64` byte length followed by its payload, and
//! sections nest (replica → weight class or stratum → component). The
//! footer holds the size report, which decoding recomputes and checks.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::basic::{BasicClass, BasicSketch};
use crate::error::{Result, SketchError};
use crate::graph::{Edge, WeightedGraph};
use crate::improved::{ImprovedSketch, StoredStratum};
use crate::orient::Arc;
use crate::params::SketchParams;
use crate::partition::StratumKind;
use crate::s1::{HeavySamples, S1ComponentSketch};
use crate::s2::{InSamples, S2ComponentSketch, S2Stratum, S2Vertex};
use crate::sketch::{size_report, Algorithm, Replica, SizeReport, Sketch};

pub const MAGIC: &[u8; 4] = b"LSK1";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Default)]
struct Writer {
    buf: Vec<u8>,
}

impl Writer {
    fn u8(&mut self, v: u8) {
        self.buf.push(v);
    }
    fn u32(&mut self, v: u32) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }
    fn i32(&mut self, v: i32) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }
    fn u64(&mut self, v: u64) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }
    fn usize(&mut self, v: usize) {
        self.u64(v as u64);
    }
    fn f64(&mut self, v: f64) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }

    fn section(&mut self, body: impl FnOnce(&mut Writer)) {
        let mut inner = Writer::default();
        body(&mut inner);
        self.usize(inner.buf.len());
        self.buf.extend_from_slice(&inner.buf);
    }

    fn graph(&mut self, g: &WeightedGraph) {
        self.usize(g.edge_count());
        for e in g.edges() {
            self.usize(e.u);
            self.usize(e.v);
            self.f64(e.w);
        }
    }

    fn edges(&mut self, edges: &[Edge]) {
        self.usize(edges.len());
        for e in edges {
            self.usize(e.u);
            self.usize(e.v);
            self.f64(e.w);
        }
    }

    fn arcs(&mut self, arcs: &[Arc]) {
        self.usize(arcs.len());
        for a in arcs {
            self.usize(a.tail);
            self.usize(a.head);
            self.f64(a.w);
        }
    }

    fn draws(&mut self, draws: &[(usize, u32)]) {
        self.usize(draws.len());
        for &(v, c) in draws {
            self.usize(v);
            self.u32(c);
        }
    }
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
    n: usize,
}

impl<'a> Reader<'a> {
    fn new(buf: &'a [u8], n: usize) -> Self {
        Self { buf, pos: 0, n }
    }

    fn take(&mut self, len: usize) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(len)
            .filter(|&e| e <= self.buf.len())
            .ok_or_else(|| SketchError::Format(format!("truncated at byte {}", self.pos)))?;
        let s = &self.buf[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn array<const N: usize>(&mut self) -> Result<[u8; N]> {
        Ok(self.take(N)?.try_into().expect("length checked"))
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.array::<1>()?[0])
    }
    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.array()?))
    }
    fn i32(&mut self) -> Result<i32> {
        Ok(i32::from_le_bytes(self.array()?))
    }
    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.array()?))
    }
    fn usize(&mut self) -> Result<usize> {
        usize::try_from(self.u64()?).map_err(|_| SketchError::Format("value exceeds usize".into()))
    }
    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.array()?))
    }

    fn vertex(&mut self) -> Result<usize> {
        let v = self.usize()?;
        if v >= self.n {
            return Err(SketchError::Format(format!("vertex {v} out of range (n = {})", self.n)));
        }
        Ok(v)
    }

    /// Guards allocation sizes against corrupt counts.
    fn count(&mut self, min_item_bytes: usize) -> Result<usize> {
        let c = self.usize()?;
        if c.saturating_mul(min_item_bytes) > self.buf.len() - self.pos {
            return Err(SketchError::Format(format!("count {c} exceeds remaining bytes")));
        }
        Ok(c)
    }

    fn section(&mut self) -> Result<Reader<'a>> {
        let len = self.usize()?;
        Ok(Reader::new(self.take(len)?, self.n))
    }

    fn finish(&self) -> Result<()> {
        if self.pos != self.buf.len() {
            return Err(SketchError::Format(format!(
                "{} trailing bytes in section",
                self.buf.len() - self.pos
            )));
        }
        Ok(())
    }

    fn triples(&mut self) -> Result<Vec<(usize, usize, f64)>> {
        let c = self.count(24)?;
        (0..c)
            .map(|_| Ok((self.vertex()?, self.vertex()?, self.f64()?)))
            .collect()
    }

    fn graph(&mut self) -> Result<WeightedGraph> {
        let triples = self.triples()?;
        let len = triples.len();
        let g = WeightedGraph::new(self.n, triples)?;
        if g.edge_count() != len {
            return Err(SketchError::Format("duplicate edge in stored graph".into()));
        }
        Ok(g)
    }

    fn edges(&mut self) -> Result<Vec<Edge>> {
        Ok(self.graph()?.edges().to_vec())
    }

    fn arcs(&mut self) -> Result<Vec<Arc>> {
        Ok(self
            .triples()?
            .into_iter()
            .map(|(tail, head, w)| Arc { tail, head, w })
            .collect())
    }

    fn draws(&mut self) -> Result<Vec<(usize, u32)>> {
        let c = self.count(12)?;
        (0..c).map(|_| Ok((self.vertex()?, self.u32()?))).collect()
    }
}

fn algorithm_tag(a: Algorithm) -> u8 {
    match a {
        Algorithm::Basic => 0,
        Algorithm::Improved => 1,
    }
}

fn write_basic(w: &mut Writer, b: &BasicSketch) {
    w.usize(b.alpha);
    w.usize(b.classes.len());
    for class in &b.classes {
        w.section(|w| {
            w.usize(class.index);
            w.f64(class.gamma);
            w.graph(&class.q);
            w.usize(class.components.len());
            for c in &class.components {
                w.section(|w| {
                    w.f64(c.gamma);
                    w.usize(c.alpha);
                    w.usize(c.degrees.len());
                    for &(v, d) in &c.degrees {
                        w.usize(v);
                        w.f64(d);
                    }
                    w.edges(&c.light_edges);
                    w.usize(c.heavy.len());
                    for h in &c.heavy {
                        w.usize(h.vertex);
                        w.f64(h.heavy_degree);
                        w.draws(&h.draws);
                    }
                });
            }
        });
    }
}

fn read_basic(r: &mut Reader) -> Result<BasicSketch> {
    let alpha = r.usize()?;
    let class_count = r.count(8)?;
    let mut classes = Vec::with_capacity(class_count);
    for _ in 0..class_count {
        let mut s = r.section()?;
        let index = s.usize()?;
        let gamma = s.f64()?;
        let q = s.graph()?;
        let comp_count = s.count(8)?;
        let mut components = Vec::with_capacity(comp_count);
        for _ in 0..comp_count {
            let mut c = s.section()?;
            let gamma = c.f64()?;
            let alpha = c.usize()?;
            let deg_count = c.count(16)?;
            let degrees = (0..deg_count)
                .map(|_| Ok((c.vertex()?, c.f64()?)))
                .collect::<Result<Vec<_>>>()?;
            let light_edges = c.edges()?;
            let heavy_count = c.count(24)?;
            let heavy = (0..heavy_count)
                .map(|_| {
                    Ok(HeavySamples {
                        vertex: c.vertex()?,
                        heavy_degree: c.f64()?,
                        draws: c.draws()?,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            c.finish()?;
            components.push(S1ComponentSketch {
                n: c.n,
                gamma,
                alpha,
                degrees,
                light_edges,
                heavy,
            });
        }
        s.finish()?;
        classes.push(BasicClass {
            index,
            gamma,
            q,
            components,
        });
    }
    Ok(BasicSketch {
        n: r.n,
        alpha,
        classes,
    })
}

fn write_kind(w: &mut Writer, kind: StratumKind) {
    match kind {
        StratumKind::Base => w.u8(0),
        StratumKind::Low => w.u8(1),
        StratumKind::DegreeClass(i) => {
            w.u8(2);
            w.u32(i);
        }
    }
}

fn read_kind(r: &mut Reader) -> Result<StratumKind> {
    match r.u8()? {
        0 => Ok(StratumKind::Base),
        1 => Ok(StratumKind::Low),
        2 => Ok(StratumKind::DegreeClass(r.u32()?)),
        t => Err(SketchError::Format(format!("unknown stratum kind {t}"))),
    }
}

fn write_improved(w: &mut Writer, m: &ImprovedSketch) {
    w.usize(m.beta);
    w.usize(m.stored.len());
    for st in &m.stored {
        w.section(|w| {
            write_kind(w, st.kind);
            w.i32(st.weight_class);
            w.graph(&st.graph);
        });
    }
    w.usize(m.sampled.len());
    for st in &m.sampled {
        w.section(|w| {
            w.u32(st.kappa);
            w.i32(st.weight_class);
            w.f64(st.gamma);
            w.graph(&st.q);
            w.usize(st.components.len());
            for c in &st.components {
                w.section(|w| {
                    w.f64(c.gamma);
                    w.u32(c.kappa);
                    w.usize(c.beta);
                    w.usize(c.vertices.len());
                    for v in &c.vertices {
                        w.usize(v.vertex);
                        w.f64(v.degree);
                        w.f64(v.in_degree);
                    }
                    w.arcs(&c.s_arcs);
                    w.usize(c.samples.len());
                    for s in &c.samples {
                        w.usize(s.vertex);
                        w.f64(s.heavy_in_degree);
                        w.draws(&s.draws);
                    }
                });
            }
        });
    }
}

fn read_improved(r: &mut Reader) -> Result<ImprovedSketch> {
    let beta = r.usize()?;
    let stored_count = r.count(8)?;
    let mut stored = Vec::with_capacity(stored_count);
    for _ in 0..stored_count {
        let mut s = r.section()?;
        let kind = read_kind(&mut s)?;
        let weight_class = s.i32()?;
        let graph = s.graph()?;
        s.finish()?;
        stored.push(StoredStratum {
            kind,
            weight_class,
            graph,
        });
    }
    let sampled_count = r.count(8)?;
    let mut sampled = Vec::with_capacity(sampled_count);
    for _ in 0..sampled_count {
        let mut s = r.section()?;
        let kappa = s.u32()?;
        let weight_class = s.i32()?;
        let gamma = s.f64()?;
        let q = s.graph()?;
        let comp_count = s.count(8)?;
        let mut components = Vec::with_capacity(comp_count);
        for _ in 0..comp_count {
            let mut c = s.section()?;
            let gamma = c.f64()?;
            let kappa = c.u32()?;
            let beta = c.usize()?;
            let vcount = c.count(24)?;
            let vertices = (0..vcount)
                .map(|_| {
                    Ok(S2Vertex {
                        vertex: c.vertex()?,
                        degree: c.f64()?,
                        in_degree: c.f64()?,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let s_arcs = c.arcs()?;
            let scount = c.count(24)?;
            let samples = (0..scount)
                .map(|_| {
                    Ok(InSamples {
                        vertex: c.vertex()?,
                        heavy_in_degree: c.f64()?,
                        draws: c.draws()?,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            c.finish()?;
            components.push(S2ComponentSketch {
                n: c.n,
                gamma,
                kappa,
                beta,
                vertices,
                s_arcs,
                samples,
            });
        }
        s.finish()?;
        sampled.push(S2Stratum {
            kappa,
            weight_class,
            gamma,
            q,
            components,
        });
    }
    Ok(ImprovedSketch {
        n: r.n,
        beta,
        stored,
        sampled,
    })
}

fn write_footer(w: &mut Writer, s: &SizeReport) {
    for v in footer_fields(s) {
        w.u64(v);
    }
}

fn footer_fields(s: &SizeReport) -> [u64; 7] {
    [
        s.stored_edges,
        s.sample_records,
        s.draws,
        s.degree_entries,
        s.stored_edge_bits,
        s.sample_bits,
        s.degree_table_bits,
    ]
}

pub fn encode(sk: &Sketch) -> Vec<u8> {
    let mut w = Writer::default();
    w.buf.extend_from_slice(MAGIC);
    w.u32(FORMAT_VERSION);
    w.u8(algorithm_tag(sk.algorithm));
    let p = &sk.params;
    for v in [p.eps, p.delta, p.c_alpha, p.c_beta, p.c_med] {
        w.f64(v);
    }
    w.u64(sk.seed);
    w.usize(sk.n);
    w.u32(sk.replicas.len() as u32);
    for r in &sk.replicas {
        w.section(|w| match r {
            Replica::Basic(b) => write_basic(w, b),
            Replica::Improved(m) => write_improved(w, m),
        });
    }
    let size = sk.size();
    w.section(|w| write_footer(w, &size));
    w.buf
}

pub fn decode(bytes: &[u8]) -> Result<Sketch> {
    let mut r = Reader::new(bytes, 0);
    if r.take(4)? != MAGIC {
        return Err(SketchError::Format("missing LSK1 magic".into()));
    }
    let version = r.u32()?;
    if version != FORMAT_VERSION {
        return Err(SketchError::Format(format!("unsupported version {version}")));
    }
    let algorithm = match r.u8()? {
        0 => Algorithm::Basic,
        1 => Algorithm::Improved,
        t => return Err(SketchError::Format(format!("unknown algorithm tag {t}"))),
    };
    let params = SketchParams {
        eps: r.f64()?,
        delta: r.f64()?,
        c_alpha: r.f64()?,
        c_beta: r.f64()?,
        c_med: r.f64()?,
    };
    params.validate()?;
    let seed = r.u64()?;
    let n = r.usize()?;
    r.n = n;
    let count = r.u32()? as usize;
    let mut replicas = Vec::with_capacity(count.min(1 << 16));
    for _ in 0..count {
        let mut s = r.section()?;
        replicas.push(match algorithm {
            Algorithm::Basic => Replica::Basic(read_basic(&mut s)?),
            Algorithm::Improved => Replica::Improved(read_improved(&mut s)?),
        });
        s.finish()?;
    }
    let mut footer = r.section()?;
    let mut stored = [0u64; 7];
    for v in stored.iter_mut() {
        *v = footer.u64()?;
    }
    footer.finish()?;
    r.finish()?;

    let sk = Sketch {
        algorithm,
        params,
        seed,
        n,
        replicas,
    };
    let recomputed = sk.replicas.iter().map(size_report).fold(SizeReport::default(), |a, b| a + b);
    if footer_fields(&recomputed) != stored {
        return Err(SketchError::Format("footer size summary does not match body".into()));
    }
    Ok(sk)
}

/// Writes through a fresh temporary file in the target directory and
/// renames it into place.
pub fn save(sk: &Sketch, path: &Path) -> Result<()> {
    let bytes = encode(sk);
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path
        .file_name()
        .ok_or_else(|| SketchError::InvalidParameter(format!("not a file path: {}", path.display())))?;
    let tmp = dir.join(format!(".{}.{}.tmp", name.to_string_lossy(), std::process::id()));
    let mut f = fs::OpenOptions::new().write(true).create_new(true).open(&tmp)?;
    let written = f.write_all(&bytes).and_then(|_| f.sync_all());
    drop(f);
    if let Err(e) = written.and_then(|_| fs::rename(&tmp, path)) {
        let _ = fs::remove_file(&tmp);
        return Err(e.into());
    }
    Ok(())
}

pub fn load(path: &Path) -> Result<Sketch> {
    decode(&fs::read(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basic::BuildOptions;
    use crate::sketch::build_sketch_with_replicas;

    fn sample_graph() -> WeightedGraph {
        let n = 16;
        let edges = (0..n).flat_map(|u| {
            (u + 1..n)
                .filter(move |v| (u + v) % 3 != 0)
                .map(move |v| (u, v, 1.0 + ((u * v) % 5) as f64))
        });
        WeightedGraph::new(n, edges).unwrap()
    }

    #[test]
    fn round_trip_both_algorithms() {
        let g = sample_graph();
        let params = SketchParams::new(0.5, 0.2).unwrap().with_constants(0.5, 0.5).unwrap();
        for algo in [Algorithm::Basic, Algorithm::Improved] {
            let sk = build_sketch_with_replicas(&g, algo, &params, &BuildOptions::default(), 9, 3).unwrap();
            let bytes = encode(&sk);
            let back = decode(&bytes).unwrap();
            assert_eq!(back, sk);
            assert_eq!(encode(&back), bytes);
        }
    }

    #[test]
    fn rejects_corruption() {
        let g = sample_graph();
        let params = SketchParams::new(0.5, 0.2).unwrap();
        let sk = build_sketch_with_replicas(&g, Algorithm::Basic, &params, &BuildOptions::default(), 1, 1).unwrap();
        let bytes = encode(&sk);
        assert!(decode(&bytes[..bytes.len() - 1]).is_err());
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(decode(&bad).is_err());
        let mut extra = bytes.clone();
        extra.push(0);
        assert!(decode(&extra).is_err());
    }
}
