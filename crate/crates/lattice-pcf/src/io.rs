//! File formats: occupancy CSV, graph edge/occupied lists, PGM/PPM image
//! ingestion and the profile CSV schema. All formats carry a `format=1`
//! header key; writers are byte-deterministic for identical inputs.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::GeneralLattice;
use crate::lattice::{make_grid, BoundaryKind, Coord, Dims, OccupancyGrid, TessellationKind};
use crate::metric::MetricKind;
use crate::profile::{
    DomainLabel, Normalization, PcfProfile, ProfileEntry, ProfileMeta, Value,
};

fn format_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Format {
        line,
        msg: msg.into(),
    }
}

/// Twelve significant digits, scientific notation; the serialisation used
/// for every real-valued field.
pub fn sig12(x: f64) -> String {
    format!("{:.11e}", x)
}

pub fn parse_dims(s: &str) -> Result<Dims> {
    let parts: Vec<&str> = s.split('x').collect();
    let parse_one = |t: &str| -> Result<u32> {
        t.parse()
            .map_err(|_| Error::InvalidParameter(format!("bad extent `{t}` in dims `{s}`")))
    };
    match parts.as_slice() {
        [lx, ly] => Dims::d2(parse_one(lx)?, parse_one(ly)?),
        [lx, ly, lz] => Dims::d3(parse_one(lx)?, parse_one(ly)?, parse_one(lz)?),
        _ => Err(Error::InvalidParameter(format!(
            "dims `{s}` must be LxL or LxLxL"
        ))),
    }
}

fn header_kv(line: &str) -> Vec<(String, String)> {
    line.trim_start_matches('#')
        .split_whitespace()
        .filter_map(|tok| {
            tok.split_once('=')
                .map(|(k, v)| (k.to_string(), v.to_string()))
        })
        .collect()
}

// ---------------------------------------------------------------------------
// occupancy CSV
// ---------------------------------------------------------------------------

/// Reads an occupancy file: a `# format=1 kind=<kind> bc=<bc>` header, then
/// rows of comma-separated 0/1 cells (row 1 is y = 1). Cubic grids use one
/// block of rows per layer, separated by a blank line, layer 1 first.
pub fn read_occupancy(path: impl AsRef<Path>) -> Result<OccupancyGrid> {
    let text = fs::read_to_string(path)?;
    parse_occupancy(&text)
}

pub fn parse_occupancy(text: &str) -> Result<OccupancyGrid> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| format_err(1, "empty file: expected a header line"))?;
    if !header.starts_with('#') {
        return Err(format_err(1, "missing `# format=1 kind=... bc=...` header"));
    }
    let kv = header_kv(header);
    let get = |key: &str| -> Result<&str> {
        kv.iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
            .ok_or_else(|| format_err(1, format!("header missing `{key}=`")))
    };
    if get("format")? != "1" {
        return Err(format_err(1, "unsupported format version"));
    }
    let kind = TessellationKind::parse(get("kind")?).map_err(|e| format_err(1, e.to_string()))?;
    let bc = BoundaryKind::parse(get("bc")?).map_err(|e| format_err(1, e.to_string()))?;

    let mut layers: Vec<Vec<Vec<bool>>> = Vec::new();
    let mut current: Vec<Vec<bool>> = Vec::new();
    let mut width: Option<usize> = None;
    for (i, raw) in lines {
        let lineno = i + 1;
        let line = raw.trim();
        if line.starts_with('#') {
            continue;
        }
        if line.is_empty() {
            if !current.is_empty() {
                layers.push(std::mem::take(&mut current));
            }
            continue;
        }
        let mut row = Vec::new();
        for cell in line.split(',') {
            match cell.trim() {
                "0" => row.push(false),
                "1" => row.push(true),
                other => {
                    return Err(format_err(
                        lineno,
                        format!("non-binary cell `{other}` (expected 0 or 1)"),
                    ))
                }
            }
        }
        match width {
            None => width = Some(row.len()),
            Some(w) if w != row.len() => {
                return Err(format_err(
                    lineno,
                    format!("ragged row: {} cells, expected {w}", row.len()),
                ))
            }
            _ => {}
        }
        current.push(row);
    }
    if !current.is_empty() {
        layers.push(current);
    }
    if layers.is_empty() {
        return Err(format_err(1, "no occupancy rows found"));
    }
    let lx = width.unwrap() as u32;
    let ly = layers[0].len() as u32;
    for (li, layer) in layers.iter().enumerate() {
        if layer.len() != ly as usize {
            return Err(format_err(
                0,
                format!("layer {} has {} rows, expected {ly}", li + 1, layer.len()),
            ));
        }
    }
    let lz = layers.len() as u32;
    if kind.is_3d() != (lz > 1) {
        return Err(format_err(
            0,
            format!(
                "kind {kind} is {}-dimensional but the file has {lz} layer(s)",
                if kind.is_3d() { 3 } else { 2 }
            ),
        ));
    }
    let dims = if kind.is_3d() {
        Dims::d3(lx, ly, lz)?
    } else {
        Dims::d2(lx, ly)?
    };
    let grid = make_grid(kind, dims, bc)?;
    let mut occ = vec![false; dims.total_sites() as usize];
    for (zi, layer) in layers.iter().enumerate() {
        for (yi, row) in layer.iter().enumerate() {
            for (xi, &cell) in row.iter().enumerate() {
                occ[zi * (lx as usize * ly as usize) + yi * lx as usize + xi] = cell;
            }
        }
    }
    Ok(grid.set_occupancy_raw(occ))
}

pub fn write_occupancy(grid: &OccupancyGrid, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, occupancy_to_string(grid))?;
    Ok(())
}

pub fn occupancy_to_string(grid: &OccupancyGrid) -> String {
    let dims = grid.dims();
    let mut out = format!(
        "# format=1 kind={} bc={}\n",
        grid.kind().label(),
        grid.bc().label()
    );
    for z in 1..=dims.lz() {
        if z > 1 {
            out.push('\n');
        }
        for y in 1..=dims.ly() {
            let row: Vec<&str> = (1..=dims.lx())
                .map(|x| if grid.is_occupied(Coord { x, y, z }) { "1" } else { "0" })
                .collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
    }
    out
}

// ---------------------------------------------------------------------------
// PGM / PPM ingestion
// ---------------------------------------------------------------------------

/// Reads a plain or binary PGM/PPM image and thresholds it into a square
/// non-periodic occupancy grid: a pixel is occupied iff every channel value
/// is strictly above the threshold (default 80). `L_x` is the image width;
/// row 1 is the top image row.
pub fn read_image(path: impl AsRef<Path>, threshold: u8) -> Result<OccupancyGrid> {
    let bytes = fs::read(path)?;
    parse_image(&bytes, threshold)
}

pub fn parse_image(bytes: &[u8], threshold: u8) -> Result<OccupancyGrid> {
    let magic = bytes.get(0..2).ok_or_else(|| format_err(1, "file too short"))?;
    let (channels, binary) = match magic {
        b"P2" => (1usize, false),
        b"P3" => (3, false),
        b"P5" => (1, true),
        b"P6" => (3, true),
        other => {
            let name = sniff_format(bytes, other);
            return Err(format_err(
                1,
                format!("unsupported image format {name}; expected PGM (P2/P5) or PPM (P3/P6)"),
            ));
        }
    };
    let mut pos = 2;
    let mut header_vals = Vec::with_capacity(3);
    while header_vals.len() < 3 {
        skip_whitespace_and_comments(bytes, &mut pos);
        let start = pos;
        while pos < bytes.len() && bytes[pos].is_ascii_digit() {
            pos += 1;
        }
        if start == pos {
            return Err(format_err(1, "malformed image header"));
        }
        let v: u32 = std::str::from_utf8(&bytes[start..pos])
            .unwrap()
            .parse()
            .map_err(|_| format_err(1, "malformed image header"))?;
        header_vals.push(v);
    }
    let (width, height, maxval) = (header_vals[0], header_vals[1], header_vals[2]);
    if maxval == 0 || maxval > 255 {
        return Err(format_err(
            1,
            format!("maxval {maxval} unsupported (expected 1..=255)"),
        ));
    }
    let npix = width as usize * height as usize;
    let mut samples = Vec::with_capacity(npix * channels);
    if binary {
        pos += 1; // single whitespace byte after maxval
        let need = npix * channels;
        let data = bytes
            .get(pos..pos + need)
            .ok_or_else(|| format_err(1, "truncated binary pixel data"))?;
        samples.extend_from_slice(data);
    } else {
        while samples.len() < npix * channels {
            skip_whitespace_and_comments(bytes, &mut pos);
            let start = pos;
            while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                pos += 1;
            }
            if start == pos {
                return Err(format_err(1, "truncated plain pixel data"));
            }
            let v: u32 = std::str::from_utf8(&bytes[start..pos]).unwrap().parse().unwrap();
            if v > maxval {
                return Err(format_err(1, format!("sample {v} exceeds maxval {maxval}")));
            }
            samples.push(v as u8);
        }
    }
    let dims = Dims::d2(width, height)?;
    let grid = make_grid(TessellationKind::Square, dims, BoundaryKind::NonPeriodic)?;
    let mut occ = vec![false; npix];
    for (i, px) in samples.chunks(channels).enumerate() {
        occ[i] = px.iter().all(|&v| v > threshold);
    }
    Ok(grid.set_occupancy_raw(occ))
}

fn sniff_format(bytes: &[u8], magic: &[u8]) -> String {
    if bytes.starts_with(&[0x89, b'P', b'N', b'G']) {
        "PNG".into()
    } else if bytes.starts_with(&[0xFF, 0xD8]) {
        "JPEG".into()
    } else if magic == b"P1" || magic == b"P4" {
        "PBM".into()
    } else {
        format!("{:?}", String::from_utf8_lossy(magic))
    }
}

fn skip_whitespace_and_comments(bytes: &[u8], pos: &mut usize) {
    loop {
        while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
        if *pos < bytes.len() && bytes[*pos] == b'#' {
            while *pos < bytes.len() && bytes[*pos] != b'\n' {
                *pos += 1;
            }
        } else {
            return;
        }
    }
}

// ---------------------------------------------------------------------------
// graph files
// ---------------------------------------------------------------------------

/// Reads an edge-list file (`# format=1 z=<Z>` header, then 1-based `i,j`
/// lines) and an occupied-list file (one 1-based id per line). Duplicate
/// edges collapse; self-loops and out-of-range ids are rejected.
pub fn read_graph(
    edges_path: impl AsRef<Path>,
    occupied_path: impl AsRef<Path>,
) -> Result<GeneralLattice> {
    let edges_text = fs::read_to_string(edges_path)?;
    let occupied_text = fs::read_to_string(occupied_path)?;
    parse_graph(&edges_text, &occupied_text)
}

pub fn parse_graph(edges_text: &str, occupied_text: &str) -> Result<GeneralLattice> {
    let mut lines = edges_text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| format_err(1, "empty edge file: expected `# format=1 z=<Z>`"))?;
    if !header.starts_with('#') {
        return Err(format_err(1, "missing `# format=1 z=<Z>` header"));
    }
    let kv = header_kv(header);
    let z: usize = kv
        .iter()
        .find(|(k, _)| k == "z")
        .map(|(_, v)| v.as_str())
        .ok_or_else(|| format_err(1, "header missing `z=`"))?
        .parse()
        .map_err(|_| format_err(1, "bad vertex count in header"))?;
    let mut edges = Vec::new();
    for (i, raw) in lines {
        let lineno = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (a, b) = line
            .split_once(',')
            .ok_or_else(|| format_err(lineno, "expected `i,j`"))?;
        let pi: u32 = a.trim().parse().map_err(|_| format_err(lineno, "bad vertex id"))?;
        let pj: u32 = b.trim().parse().map_err(|_| format_err(lineno, "bad vertex id"))?;
        if pi == pj {
            return Err(format_err(lineno, format!("self-loop at vertex {pi}")));
        }
        if pi < 1 || pj < 1 || pi as usize > z || pj as usize > z {
            return Err(format_err(lineno, format!("edge ({pi},{pj}) out of range 1..={z}")));
        }
        edges.push((pi, pj));
    }
    let lattice = GeneralLattice::from_edges(z, &edges)?;
    let mut occupied = Vec::new();
    for (i, raw) in occupied_text.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let v: u32 = line
            .parse()
            .map_err(|_| format_err(lineno, format!("bad occupied vertex id `{line}`")))?;
        if v < 1 || v as usize > z {
            return Err(format_err(lineno, format!("occupied vertex {v} out of range 1..={z}")));
        }
        occupied.push(v);
    }
    lattice.with_occupied(&occupied)
}

pub fn write_graph(lattice: &GeneralLattice, edges_path: impl AsRef<Path>, occupied_path: impl AsRef<Path>) -> Result<()> {
    let mut edges = format!("# format=1 z={}\n", lattice.vertex_count());
    for (i, j) in lattice.edges() {
        edges.push_str(&format!("{i},{j}\n"));
    }
    fs::write(edges_path, edges)?;
    let mut occ = String::from("# format=1\n");
    for v in lattice.occupied_vertices() {
        occ.push_str(&format!("{v}\n"));
    }
    fs::write(occupied_path, occ)?;
    Ok(())
}

// ---------------------------------------------------------------------------
// profile CSV
// ---------------------------------------------------------------------------

/// Serialises a profile: key=value comment header (the full provenance
/// block), then `m,count,expected,f` rows with real fields at 12
/// significant digits. Identical profiles produce identical bytes.
pub fn profile_to_string(profile: &PcfProfile) -> String {
    let meta = &profile.meta;
    let mut out = String::from("# format=1\n");
    out.push_str(&format!("# kind={}\n", meta.kind));
    out.push_str(&format!("# metric={}\n", meta.metric.label()));
    out.push_str(&format!(
        "# bc={}\n",
        meta.bc.map(|b| b.label()).unwrap_or("-")
    ));
    out.push_str(&format!(
        "# dims={}\n",
        meta.dims.map(|d| d.to_string()).unwrap_or_else(|| "-".into())
    ));
    out.push_str(&format!("# sites={}\n", meta.sites));
    out.push_str(&format!(
        "# agents={}\n",
        meta.agents.map(|n| n.to_string()).unwrap_or_else(|| "-".into())
    ));
    out.push_str(&format!(
        "# seed={}\n",
        meta.seed.map(|s| s.to_string()).unwrap_or_else(|| "-".into())
    ));
    out.push_str(&format!(
        "# generator={}\n",
        meta.generator.clone().unwrap_or_else(|| "-".into())
    ));
    out.push_str(&format!(
        "# normalization={}\n",
        match meta.normalization {
            Normalization::Exact => "exact",
            Normalization::Approximate => "approximate",
        }
    ));
    if meta.unreachable_pairs > 0 {
        out.push_str(&format!("# unreachable_pairs={}\n", meta.unreachable_pairs));
    }
    out.push_str("m,count,expected,f\n");
    for e in &profile.entries {
        out.push_str(&format!(
            "{},{},{},{}\n",
            e.m,
            e.count,
            sig12(e.expected.to_f64()),
            sig12(e.f.to_f64())
        ));
    }
    out
}

pub fn write_profile(profile: &PcfProfile, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, profile_to_string(profile))?;
    Ok(())
}

/// Two-column `m,f` output for external plotting tools; all header
/// metadata is omitted except a single seed comment.
pub fn profile_to_plot_data(profile: &PcfProfile) -> String {
    let mut out = format!(
        "# seed={}\n",
        profile.meta.seed.map(|s| s.to_string()).unwrap_or_else(|| "-".into())
    );
    for e in &profile.entries {
        out.push_str(&format!("{},{}\n", e.m, sig12(e.f.to_f64())));
    }
    out
}

pub fn write_profile_plot_data(profile: &PcfProfile, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, profile_to_plot_data(profile))?;
    Ok(())
}

/// Parses a profile CSV back. Real-valued fields come back as floats at the
/// serialised precision: re-serialising a parsed profile is byte-identical.
pub fn read_profile(path: impl AsRef<Path>) -> Result<PcfProfile> {
    let text = fs::read_to_string(path)?;
    parse_profile(&text)
}

pub fn parse_profile(text: &str) -> Result<PcfProfile> {
    let mut kind: Option<DomainLabel> = None;
    let mut metric: Option<MetricKind> = None;
    let mut bc: Option<BoundaryKind> = None;
    let mut dims: Option<Dims> = None;
    let mut sites: Option<u64> = None;
    let mut agents: Option<u64> = None;
    let mut seed: Option<u64> = None;
    let mut generator: Option<String> = None;
    let mut normalization = Normalization::Exact;
    let mut unreachable_pairs = 0u64;
    let mut entries = Vec::new();
    let mut saw_columns = false;

    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            let rest = rest.trim();
            if let Some((k, v)) = rest.split_once('=') {
                let v = v.trim();
                match k.trim() {
                    "format" => {
                        if v != "1" {
                            return Err(format_err(lineno, "unsupported format version"));
                        }
                    }
                    "kind" => {
                        kind = Some(if v == "graph" {
                            DomainLabel::Graph
                        } else {
                            DomainLabel::Tessellation(
                                TessellationKind::parse(v)
                                    .map_err(|e| format_err(lineno, e.to_string()))?,
                            )
                        })
                    }
                    "metric" => {
                        metric = Some(
                            MetricKind::parse(v).map_err(|e| format_err(lineno, e.to_string()))?,
                        )
                    }
                    "bc" if v != "-" => {
                        bc = Some(
                            BoundaryKind::parse(v).map_err(|e| format_err(lineno, e.to_string()))?,
                        )
                    }
                    "dims" if v != "-" => {
                        dims = Some(parse_dims(v).map_err(|e| format_err(lineno, e.to_string()))?)
                    }
                    "sites" => {
                        sites = Some(v.parse().map_err(|_| format_err(lineno, "bad sites"))?)
                    }
                    "agents" if v != "-" => {
                        agents = Some(v.parse().map_err(|_| format_err(lineno, "bad agents"))?)
                    }
                    "seed" if v != "-" => {
                        seed = Some(v.parse().map_err(|_| format_err(lineno, "bad seed"))?)
                    }
                    "generator" if v != "-" => generator = Some(v.to_string()),
                    "normalization" => {
                        normalization = match v {
                            "exact" => Normalization::Exact,
                            "approximate" => Normalization::Approximate,
                            _ => return Err(format_err(lineno, "bad normalization")),
                        }
                    }
                    "unreachable_pairs" => {
                        unreachable_pairs =
                            v.parse().map_err(|_| format_err(lineno, "bad unreachable_pairs"))?
                    }
                    _ => {}
                }
            }
            continue;
        }
        if line == "m,count,expected,f" {
            saw_columns = true;
            continue;
        }
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != 4 {
            return Err(format_err(lineno, "expected `m,count,expected,f`"));
        }
        let m: u32 = cells[0].trim().parse().map_err(|_| format_err(lineno, "bad m"))?;
        let count: u64 = cells[1].trim().parse().map_err(|_| format_err(lineno, "bad count"))?;
        let expected: f64 = cells[2].trim().parse().map_err(|_| format_err(lineno, "bad expected"))?;
        let f: f64 = cells[3].trim().parse().map_err(|_| format_err(lineno, "bad f"))?;
        entries.push(ProfileEntry {
            m,
            count,
            expected: Value::Real(expected),
            f: Value::Real(f),
        });
    }
    if !saw_columns || entries.is_empty() {
        return Err(format_err(1, "no profile rows found"));
    }
    let kind = kind.ok_or_else(|| format_err(1, "header missing `kind=`"))?;
    let metric = metric.ok_or_else(|| format_err(1, "header missing `metric=`"))?;
    let sites = sites.ok_or_else(|| format_err(1, "header missing `sites=`"))?;
    Ok(PcfProfile {
        meta: ProfileMeta {
            kind,
            metric,
            bc,
            dims,
            sites,
            agents,
            seed,
            generator,
            normalization,
            unreachable_pairs,
        },
        entries,
    })
}
