//! On-disk formats: binary field and frame containers, trajectory
//! directories with a JSON manifest, and norm CSV rows.

use std::collections::BTreeMap;
use std::fs;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Side, SpectralField};
use crate::grid::GridSpec;
use crate::randomize::angular::{FrameCertificate, GoodFrame};
use crate::scalar::Real;
use crate::trajectory::{Provenance, Trajectory};

pub const FIELD_MAGIC: [u8; 4] = *b"ZKRF";
pub const FIELD_VERSION: u32 = 1;
pub const FRAME_MAGIC: [u8; 4] = *b"ZKRB";
pub const FRAME_VERSION: u32 = 1;
pub const MANIFEST_VERSION: u32 = 1;
pub const MANIFEST_FILE: &str = "manifest.json";

fn put_u32(w: &mut impl Write, x: u32) -> Result<()> {
    Ok(w.write_all(&x.to_le_bytes())?)
}

fn put_u64(w: &mut impl Write, x: u64) -> Result<()> {
    Ok(w.write_all(&x.to_le_bytes())?)
}

fn put_f64(w: &mut impl Write, x: f64) -> Result<()> {
    Ok(w.write_all(&x.to_le_bytes())?)
}

fn get<const K: usize>(r: &mut impl Read) -> Result<[u8; K]> {
    let mut b = [0u8; K];
    r.read_exact(&mut b).map_err(|e| match e.kind() {
        std::io::ErrorKind::UnexpectedEof => Error::Format("truncated container".into()),
        _ => Error::Io(e),
    })?;
    Ok(b)
}

fn get_u32(r: &mut impl Read) -> Result<u32> {
    Ok(u32::from_le_bytes(get(r)?))
}

fn get_u64(r: &mut impl Read) -> Result<u64> {
    Ok(u64::from_le_bytes(get(r)?))
}

fn get_f64(r: &mut impl Read) -> Result<f64> {
    Ok(f64::from_le_bytes(get(r)?))
}

fn check_magic(r: &mut impl Read, magic: [u8; 4], version: u32) -> Result<()> {
    let m: [u8; 4] = get(r)?;
    if m != magic {
        return Err(Error::Format(format!(
            "bad magic {:?}, expected {:?}",
            String::from_utf8_lossy(&m),
            String::from_utf8_lossy(&magic)
        )));
    }
    let v = get_u32(r)?;
    if v != version {
        return Err(Error::Format(format!("container version {v}, expected {version}")));
    }
    Ok(())
}

fn expect_end(r: &mut impl Read) -> Result<()> {
    let mut b = [0u8; 1];
    if r.read(&mut b)? != 0 {
        return Err(Error::Format("trailing bytes after container".into()));
    }
    Ok(())
}

/// Header `ZKRF | version u32 | N u32 | L f64 | side u8`, then `N^3`
/// `(re, im)` pairs of f64 in storage order, all little-endian.
pub fn write_field<T: Real>(w: &mut impl Write, f: &SpectralField<T>) -> Result<()> {
    let g = f.grid();
    w.write_all(&FIELD_MAGIC)?;
    put_u32(w, FIELD_VERSION)?;
    put_u32(w, g.n() as u32)?;
    put_f64(w, g.box_length().as_f64())?;
    w.write_all(&[match f.side() {
        Side::Frequency => 0,
        Side::Physical => 1,
    }])?;
    for z in f.data() {
        put_f64(w, z.re.as_f64())?;
        put_f64(w, z.im.as_f64())?;
    }
    Ok(())
}

pub fn read_field<T: Real>(r: &mut impl Read) -> Result<SpectralField<T>> {
    check_magic(r, FIELD_MAGIC, FIELD_VERSION)?;
    let n = get_u32(r)? as usize;
    let l = get_f64(r)?;
    let side = match get::<1>(r)?[0] {
        0 => Side::Frequency,
        1 => Side::Physical,
        t => return Err(Error::Format(format!("unknown side tag {t}"))),
    };
    let grid = GridSpec::new(T::of(l), n)?;
    let mut data = Vec::with_capacity(grid.len());
    for _ in 0..grid.len() {
        let re = get_f64(r)?;
        let im = get_f64(r)?;
        data.push(Complex::new(T::of(re), T::of(im)));
    }
    expect_end(r)?;
    SpectralField::from_parts(&grid, data, side)
}

pub fn save_field<T: Real>(path: &Path, f: &SpectralField<T>) -> Result<()> {
    let mut w = BufWriter::new(fs::File::create(path)?);
    write_field(&mut w, f)?;
    Ok(w.flush()?)
}

pub fn load_field<T: Real>(path: &Path) -> Result<SpectralField<T>> {
    read_field(&mut BufReader::new(fs::File::open(path)?))
}

/// Pretty JSON with a trailing newline.
pub fn save_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(fs::write(path, s)?)
}

pub fn load_json<V: for<'de> Deserialize<'de>>(path: &Path) -> Result<V> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

/// JSON sidecar of a frame container.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrameSidecar {
    pub seed: u64,
    pub attempt: usize,
    pub k_deg_max: usize,
    pub c_frame: f64,
    pub quad_degree: usize,
    pub cert_degree: usize,
}

impl FrameSidecar {
    pub fn of(frame: &GoodFrame) -> Self {
        Self {
            seed: frame.seed,
            attempt: frame.attempt,
            k_deg_max: frame.k_deg_max,
            c_frame: frame.certificate.c_frame,
            quad_degree: frame.quad_degree,
            cert_degree: frame.certificate.cert_degree,
        }
    }
}

/// Header `ZKRB | version | k_deg_max u32 | seed u64 | attempt u32 |
/// quad_degree u32 | cert_degree u32 | C_frame f64`, then per degree the
/// `(2k+1)^2` mixing entries, the four `L^q` maxima and the `L^inf` maximum.
pub fn write_frame(w: &mut impl Write, frame: &GoodFrame) -> Result<()> {
    let c = &frame.certificate;
    w.write_all(&FRAME_MAGIC)?;
    put_u32(w, FRAME_VERSION)?;
    put_u32(w, frame.k_deg_max as u32)?;
    put_u64(w, frame.seed)?;
    put_u32(w, frame.attempt as u32)?;
    put_u32(w, frame.quad_degree as u32)?;
    put_u32(w, c.cert_degree as u32)?;
    put_f64(w, c.c_frame)?;
    for k in 0..=frame.k_deg_max {
        for &x in &frame.mixing[k] {
            put_f64(w, x)?;
        }
        for &x in c.lq_max.get(k).unwrap_or(&[0.0; 4]) {
            put_f64(w, x)?;
        }
        put_f64(w, c.linf_max.get(k).copied().unwrap_or(0.0))?;
    }
    Ok(())
}

pub fn read_frame(r: &mut impl Read) -> Result<GoodFrame> {
    check_magic(r, FRAME_MAGIC, FRAME_VERSION)?;
    let k_deg_max = get_u32(r)? as usize;
    if k_deg_max > 256 {
        return Err(Error::Format(format!("implausible frame degree {k_deg_max}")));
    }
    let seed = get_u64(r)?;
    let attempt = get_u32(r)? as usize;
    let quad_degree = get_u32(r)? as usize;
    let cert_degree = get_u32(r)? as usize;
    let c_frame = get_f64(r)?;
    let mut mixing = Vec::with_capacity(k_deg_max + 1);
    let mut lq_max = Vec::with_capacity(k_deg_max + 1);
    let mut linf_max = Vec::with_capacity(k_deg_max + 1);
    for k in 0..=k_deg_max {
        let d = 2 * k + 1;
        mixing.push((0..d * d).map(|_| get_f64(r)).collect::<Result<Vec<_>>>()?);
        lq_max.push([get_f64(r)?, get_f64(r)?, get_f64(r)?, get_f64(r)?]);
        linf_max.push(get_f64(r)?);
    }
    expect_end(r)?;
    let cert = FrameCertificate { lq_max, linf_max, c_frame, cert_degree };
    GoodFrame::from_parts(k_deg_max, seed, attempt, mixing, cert, quad_degree)
}

/// Writes `<stem>.zkrb` and `<stem>.json`.
pub fn save_frame(dir: &Path, stem: &str, frame: &GoodFrame) -> Result<()> {
    let mut w = BufWriter::new(fs::File::create(dir.join(format!("{stem}.zkrb")))?);
    write_frame(&mut w, frame)?;
    w.flush()?;
    save_json(&dir.join(format!("{stem}.json")), &FrameSidecar::of(frame))
}

pub fn load_frame(path: &Path) -> Result<GoodFrame> {
    read_frame(&mut BufReader::new(fs::File::open(path)?))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridRecord {
    pub l: f64,
    pub n: usize,
}

impl GridRecord {
    pub fn of<T: Real>(g: &GridSpec<T>) -> Self {
        Self { l: g.box_length().as_f64(), n: g.n() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SnapshotRecord {
    pub index: usize,
    pub t: f64,
    pub u: String,
    pub v: String,
}

/// `manifest.json` of a trajectory directory.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryManifest {
    pub schema_version: u32,
    pub grid: GridRecord,
    pub t0: f64,
    pub dt: f64,
    pub t_max: f64,
    pub alpha: f64,
    pub provenance: Provenance,
    pub seeds: BTreeMap<String, u64>,
    pub norms: BTreeMap<String, f64>,
    pub snapshots: Vec<SnapshotRecord>,
}

/// Run-level metadata stored next to the snapshots.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TrajectoryMeta {
    pub alpha: f64,
    pub seeds: BTreeMap<String, u64>,
    pub norms: BTreeMap<String, f64>,
}

/// Writes every `stride`-th snapshot (and always the last) as `u_XXXX.zkrf`,
/// `v_XXXX.zkrf`, plus the manifest. Returns the manifest.
pub fn save_trajectory<T: Real>(
    dir: &Path,
    traj: &Trajectory<T>,
    meta: &TrajectoryMeta,
    stride: usize,
) -> Result<TrajectoryManifest> {
    if traj.is_empty() {
        return Err(Error::EmptyTrajectory);
    }
    let stride = stride.max(1);
    fs::create_dir_all(dir)?;
    let last = traj.len() - 1;
    let mut snapshots = Vec::new();
    for i in (0..traj.len()).filter(|&i| i % stride == 0 || i == last) {
        let rec = SnapshotRecord {
            index: i,
            t: traj.time(i).as_f64(),
            u: format!("u_{i:05}.zkrf"),
            v: format!("v_{i:05}.zkrf"),
        };
        save_field(&dir.join(&rec.u), traj.u(i))?;
        save_field(&dir.join(&rec.v), traj.v(i))?;
        snapshots.push(rec);
    }
    let m = TrajectoryManifest {
        schema_version: MANIFEST_VERSION,
        grid: GridRecord::of(traj.grid()),
        t0: traj.t0().as_f64(),
        dt: traj.dt().as_f64(),
        t_max: traj.t_end().as_f64(),
        alpha: meta.alpha,
        provenance: traj.provenance.clone(),
        seeds: meta.seeds.clone(),
        norms: meta.norms.clone(),
        snapshots,
    };
    save_json(&dir.join(MANIFEST_FILE), &m)?;
    Ok(m)
}

/// Reads the manifest and the stored snapshots. The returned trajectory has
/// the stored snapshots only, at spacing `stride * dt`, so it requires
/// uniformly strided snapshots.
pub fn load_trajectory<T: Real>(dir: &Path) -> Result<(Trajectory<T>, TrajectoryManifest)> {
    let m: TrajectoryManifest = load_json(&dir.join(MANIFEST_FILE))?;
    if m.schema_version != MANIFEST_VERSION {
        return Err(Error::Format(format!(
            "manifest schema {}, expected {MANIFEST_VERSION}",
            m.schema_version
        )));
    }
    if m.snapshots.is_empty() {
        return Err(Error::EmptyTrajectory);
    }
    let step = if m.snapshots.len() > 1 { m.snapshots[1].index - m.snapshots[0].index } else { 1 };
    if m.snapshots.windows(2).any(|w| w[1].index - w[0].index != step) {
        return Err(Error::Format("snapshots are not uniformly strided".into()));
    }
    let grid = GridSpec::new(T::of(m.grid.l), m.grid.n)?;
    let mut us = Vec::with_capacity(m.snapshots.len());
    let mut vs = Vec::with_capacity(m.snapshots.len());
    for s in &m.snapshots {
        let u: SpectralField<T> = load_field(&dir.join(&s.u))?;
        let v: SpectralField<T> = load_field(&dir.join(&s.v))?;
        if u.grid() != &grid || v.grid() != &grid {
            return Err(Error::GridMismatch);
        }
        us.push(u);
        vs.push(v);
    }
    let t0 = m.snapshots[0].t;
    let traj = Trajectory::new(T::of(t0), T::of(m.dt * step as f64), us, vs, m.provenance.clone())?;
    Ok((traj, m))
}

/// One evaluated norm: `run_id, norm_name, mu, q, s, sigma, T, value, truncation_diagnostic`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormRow {
    pub run_id: String,
    pub norm_name: String,
    pub mu: f64,
    pub q: f64,
    pub s: f64,
    pub sigma: f64,
    pub t: f64,
    pub value: f64,
    pub truncation_diagnostic: f64,
}

pub const NORM_CSV_HEADER: &str = "run_id,norm_name,mu,q,s,sigma,T,value,truncation_diagnostic";

pub fn write_norm_csv(w: &mut impl Write, rows: &[NormRow]) -> Result<()> {
    writeln!(w, "{NORM_CSV_HEADER}")?;
    for r in rows {
        if r.run_id.contains(',') || r.norm_name.contains(',') {
            return Err(Error::Format(format!("comma in id '{}' / '{}'", r.run_id, r.norm_name)));
        }
        writeln!(
            w,
            "{},{},{:e},{:e},{:e},{:e},{:e},{:e},{:e}",
            r.run_id, r.norm_name, r.mu, r.q, r.s, r.sigma, r.t, r.value, r.truncation_diagnostic
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::randomize::{build_good_frame, FrameOptions};

    fn sample(g: &GridSpec<f64>) -> SpectralField<f64> {
        SpectralField::from_fn(g, |x| Complex::new((x[0] * 0.3).sin() + x[2], x[1].cos()))
    }

    #[test]
    fn field_roundtrip_is_bitwise() {
        let g = GridSpec::<f64>::new(7.5, 8).unwrap();
        for f in [sample(&g), sample(&g).to_frequency()] {
            let mut buf = Vec::new();
            write_field(&mut buf, &f).unwrap();
            assert_eq!(buf.len(), 4 + 4 + 4 + 8 + 1 + 16 * 512);
            assert_eq!(&buf[..4], b"ZKRF");
            let back: SpectralField<f64> = read_field(&mut buf.as_slice()).unwrap();
            assert_eq!(back.grid(), f.grid());
            assert_eq!(back.side(), f.side());
            assert!(back.data().iter().zip(f.data()).all(|(a, b)| a.re.to_bits() == b.re.to_bits()
                && a.im.to_bits() == b.im.to_bits()));
        }
    }

    #[test]
    fn field_header_is_little_endian() {
        let g = GridSpec::<f64>::new(2.0, 8).unwrap();
        let mut buf = Vec::new();
        write_field(&mut buf, &SpectralField::zeros(&g)).unwrap();
        assert_eq!(&buf[4..8], &[1, 0, 0, 0]);
        assert_eq!(&buf[8..12], &[8, 0, 0, 0]);
        assert_eq!(&buf[12..20], &2.0f64.to_le_bytes());
        assert_eq!(buf[20], 0);
    }

    #[test]
    fn field_rejects_corruption() {
        let g = GridSpec::<f64>::new(2.0, 8).unwrap();
        let mut buf = Vec::new();
        write_field(&mut buf, &sample(&g)).unwrap();
        let mut bad = buf.clone();
        bad[0] = b'X';
        assert!(matches!(read_field::<f64>(&mut bad.as_slice()), Err(Error::Format(_))));
        let short = &buf[..buf.len() - 3];
        assert!(matches!(read_field::<f64>(&mut &short[..]), Err(Error::Format(_))));
        let mut long = buf.clone();
        long.push(0);
        assert!(matches!(read_field::<f64>(&mut long.as_slice()), Err(Error::Format(_))));
        let mut tag = buf;
        tag[20] = 9;
        assert!(matches!(read_field::<f64>(&mut tag.as_slice()), Err(Error::Format(_))));
    }

    #[test]
    fn single_precision_field_widens_on_write() {
        let g = GridSpec::<f32>::new(3.0, 8).unwrap();
        let f = SpectralField::from_fn(&g, |x| Complex::new(x[0], 0.5));
        let mut buf = Vec::new();
        write_field(&mut buf, &f).unwrap();
        let back: SpectralField<f32> = read_field(&mut buf.as_slice()).unwrap();
        assert_eq!(back.data(), f.data());
    }

    #[test]
    fn frame_roundtrip() {
        let fr = build_good_frame(&FrameOptions::with_degree(4), 11).unwrap();
        let mut buf = Vec::new();
        write_frame(&mut buf, &fr).unwrap();
        let back = read_frame(&mut buf.as_slice()).unwrap();
        assert_eq!(back.mixing, fr.mixing);
        assert_eq!(back.certificate, fr.certificate);
        assert_eq!((back.seed, back.attempt, back.quad_degree), (fr.seed, fr.attempt, fr.quad_degree));
        let d = [0.3, -0.5, 0.81];
        assert_eq!(back.eval(d), fr.eval(d));
    }

    #[test]
    fn trajectory_directory_roundtrip() {
        let g = GridSpec::<f64>::new(6.0, 8).unwrap();
        let f = sample(&g);
        let us: Vec<_> = (0..7).map(|i| f.schrodinger_propagate(0.1 * i as f64)).collect();
        let vs: Vec<_> = us.iter().map(|u| u.abs_sq()).collect();
        let tr = Trajectory::new(1.0, 0.1, us, vs, Provenance::Forward).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let meta = TrajectoryMeta {
            alpha: 2.0,
            seeds: [("phys".to_string(), 3)].into(),
            norms: [("mass".to_string(), 1.5)].into(),
        };
        let m = save_trajectory(dir.path(), &tr, &meta, 3).unwrap();
        assert_eq!(m.snapshots.iter().map(|s| s.index).collect::<Vec<_>>(), vec![0, 3, 6]);
        let (back, m2) = load_trajectory::<f64>(dir.path()).unwrap();
        assert_eq!(m, m2);
        assert_eq!(back.len(), 3);
        assert!((back.dt() - 0.3).abs() < 1e-15);
        assert_eq!(back.u(2).data(), tr.u(6).data());
        assert_eq!(back.v(1).data(), tr.v(3).data());
        // a stride that skips the end leaves a ragged last gap
        let dir2 = tempfile::tempdir().unwrap();
        save_trajectory(dir2.path(), &tr, &meta, 4).unwrap();
        assert!(matches!(load_trajectory::<f64>(dir2.path()), Err(Error::Format(_))));
    }

    #[test]
    fn missing_manifest_is_io_error() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(load_trajectory::<f64>(dir.path()), Err(Error::Io(_))));
    }

    #[test]
    fn norm_csv_layout() {
        let row = NormRow {
            run_id: "r1".into(),
            norm_name: "xt_energy".into(),
            mu: 0.0,
            q: 2.0,
            s: 2.0,
            sigma: 0.45,
            t: 2.0,
            value: 0.125,
            truncation_diagnostic: 0.0,
        };
        let mut buf = Vec::new();
        write_norm_csv(&mut buf, &[row.clone()]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], NORM_CSV_HEADER);
        assert_eq!(lines[1].split(',').count(), 9);
        assert!(lines[1].starts_with("r1,xt_energy,"));
        let bad = NormRow { run_id: "a,b".into(), ..row };
        assert!(write_norm_csv(&mut Vec::new(), &[bad]).is_err());
    }
}
