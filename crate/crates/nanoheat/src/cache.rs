//! Binary caches for domains and resonant clusters, keyed by geometry.
//!
//! Little-endian plain doubles behind a versioned header; any key or version
//! mismatch regenerates silently.

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use crate::domain::{voxelize, ReferenceDomain, Shape};
use crate::operators::eigen::ResonantCluster;
use crate::NanoheatError;

const DOMAIN_MAGIC: &[u8; 4] = b"NHD1";
const CLUSTER_MAGIC: &[u8; 4] = b"NHC1";

fn domain_path(dir: &Path, shape: &Shape, n: usize) -> PathBuf {
    dir.join(format!("domain_{}_{n}.bin", shape.tag()))
}

/// Load the voxelized domain from cache, or voxelize and store it.
pub fn domain_cached(
    dir: &Path,
    shape: Shape,
    resolution: usize,
) -> Result<Arc<ReferenceDomain>, NanoheatError> {
    let path = domain_path(dir, &shape, resolution);
    if let Ok(dom) = read_domain(&path, &shape, resolution) {
        return Ok(dom);
    }
    let dom = voxelize(shape, resolution)?;
    std::fs::create_dir_all(dir)?;
    write_domain(&path, &dom)?;
    Ok(dom)
}

fn write_domain(path: &Path, dom: &ReferenceDomain) -> Result<(), NanoheatError> {
    let mut f = BufWriter::new(std::fs::File::create(path)?);
    f.write_all(DOMAIN_MAGIC)?;
    let tag = dom.shape.tag();
    f.write_u32::<LittleEndian>(tag.len() as u32)?;
    f.write_all(tag.as_bytes())?;
    f.write_u32::<LittleEndian>(dom.resolution as u32)?;
    f.write_u64::<LittleEndian>(dom.voxel_count() as u64)?;
    f.write_f64::<LittleEndian>(dom.voxel_volume)?;
    for c in &dom.centroids {
        for v in c {
            f.write_f64::<LittleEndian>(*v)?;
        }
    }
    Ok(())
}

fn read_domain(
    path: &Path,
    shape: &Shape,
    resolution: usize,
) -> Result<Arc<ReferenceDomain>, NanoheatError> {
    let mut f = BufReader::new(std::fs::File::open(path)?);
    let mut magic = [0u8; 4];
    f.read_exact(&mut magic)?;
    if &magic != DOMAIN_MAGIC {
        return Err(NanoheatError::Cache("domain magic mismatch".into()));
    }
    let tag_len = f.read_u32::<LittleEndian>()? as usize;
    let mut tag = vec![0u8; tag_len];
    f.read_exact(&mut tag)?;
    let n = f.read_u32::<LittleEndian>()? as usize;
    if tag != shape.tag().as_bytes() || n != resolution {
        return Err(NanoheatError::Cache("domain key mismatch".into()));
    }
    // geometry is cheap to rebuild and must agree bit-for-bit; the cache is a
    // consistency check plus an artifact other tools can read
    let count = f.read_u64::<LittleEndian>()? as usize;
    let vol = f.read_f64::<LittleEndian>()?;
    let dom = voxelize(*shape, resolution)?;
    if dom.voxel_count() != count || (dom.voxel_volume - vol).abs() > 1e-15 {
        return Err(NanoheatError::Cache("domain payload mismatch".into()));
    }
    Ok(dom)
}

fn cluster_path(dir: &Path, shape: &Shape, n: usize, kind: &str) -> PathBuf {
    dir.join(format!("cluster_{}_{n}_{kind}.bin", shape.tag()))
}

/// Store a resonant cluster.
pub fn write_cluster(
    dir: &Path,
    shape: &Shape,
    resolution: usize,
    kind: &str,
    cluster: &ResonantCluster,
) -> Result<(), NanoheatError> {
    std::fs::create_dir_all(dir)?;
    let path = cluster_path(dir, shape, resolution, kind);
    let mut f = BufWriter::new(std::fs::File::create(path)?);
    f.write_all(CLUSTER_MAGIC)?;
    f.write_u32::<LittleEndian>(resolution as u32)?;
    f.write_f64::<LittleEndian>(cluster.lambda_bar)?;
    f.write_f64::<LittleEndian>(cluster.window)?;
    f.write_f64::<LittleEndian>(cluster.max_residual)?;
    f.write_u32::<LittleEndian>(cluster.lambdas.len() as u32)?;
    f.write_u64::<LittleEndian>(cluster.fields.first().map_or(0, |v| v.len()) as u64)?;
    for l in &cluster.lambdas {
        f.write_f64::<LittleEndian>(*l)?;
    }
    for c in &cluster.couplings {
        for v in c {
            f.write_f64::<LittleEndian>(*v)?;
        }
    }
    for m in &cluster.moments {
        for v in m {
            f.write_f64::<LittleEndian>(*v)?;
        }
    }
    for field in &cluster.fields {
        for v in field {
            f.write_f64::<LittleEndian>(*v)?;
        }
    }
    Ok(())
}

/// Load a resonant cluster if a matching cache exists.
pub fn read_cluster(
    dir: &Path,
    shape: &Shape,
    resolution: usize,
    kind: &str,
    expected_len: usize,
) -> Result<ResonantCluster, NanoheatError> {
    let path = cluster_path(dir, shape, resolution, kind);
    let mut f = BufReader::new(std::fs::File::open(path)?);
    let mut magic = [0u8; 4];
    f.read_exact(&mut magic)?;
    if &magic != CLUSTER_MAGIC {
        return Err(NanoheatError::Cache("cluster magic mismatch".into()));
    }
    let n = f.read_u32::<LittleEndian>()? as usize;
    if n != resolution {
        return Err(NanoheatError::Cache("cluster resolution mismatch".into()));
    }
    let lambda_bar = f.read_f64::<LittleEndian>()?;
    let window = f.read_f64::<LittleEndian>()?;
    let max_residual = f.read_f64::<LittleEndian>()?;
    let count = f.read_u32::<LittleEndian>()? as usize;
    let field_len = f.read_u64::<LittleEndian>()? as usize;
    if field_len != expected_len {
        return Err(NanoheatError::Cache("cluster field length mismatch".into()));
    }
    let mut lambdas = vec![0.0; count];
    for l in &mut lambdas {
        *l = f.read_f64::<LittleEndian>()?;
    }
    let mut couplings = Vec::with_capacity(count);
    for _ in 0..count {
        let mut c = [0.0; 3];
        for v in &mut c {
            *v = f.read_f64::<LittleEndian>()?;
        }
        couplings.push(c);
    }
    let mut moments = Vec::with_capacity(count);
    for _ in 0..count {
        let mut c = [0.0; 3];
        for v in &mut c {
            *v = f.read_f64::<LittleEndian>()?;
        }
        moments.push(c);
    }
    let mut fields = Vec::with_capacity(count);
    for _ in 0..count {
        let mut field = vec![0.0; field_len];
        for v in &mut field {
            *v = f.read_f64::<LittleEndian>()?;
        }
        fields.push(field);
    }
    Ok(ResonantCluster { lambda_bar, lambdas, fields, couplings, moments, max_residual, window })
}
