#!/usr/bin/env python3
"""Writes the shipped scenario inputs (bathymetry rasters and forcing series).

Everything is synthetic and deterministic; rerunning reproduces the files
byte for byte.
"""
import argparse
import json
import math
import os
from datetime import datetime, timedelta, timezone


def iso(t):
    return t.strftime("%Y-%m-%dT%H:%M:%SZ")


def write_raster(path, rows_south_to_north, xll, yll, dx, dy):
    ny = len(rows_south_to_north)
    nx = len(rows_south_to_north[0])
    with open(path, "w") as f:
        f.write(f"ncols {nx}\nnrows {ny}\nxllcorner {xll}\nyllcorner {yll}\n")
        if dx == dy:
            f.write(f"cellsize {dx}\n")
        else:
            f.write(f"dx {dx}\ndy {dy}\n")
        f.write("NODATA_value -9999\n")
        for row in reversed(rows_south_to_north):
            f.write(" ".join(f"{v:g}" for v in row) + "\n")


def write_series(path, variable, times, lons, lats, value):
    with open(path, "w") as f:
        f.write(f"variable,{variable}\nunits,m/s\ncomponents,2\n")
        for t in times:
            f.write(f"time,{iso(t)}\n")
            for lat in lats:
                for lon in lons:
                    u, v = value(t, lon, lat)
                    f.write(f"{lon:.4f},{lat:.4f},{u:.4f},{v:.4f}\n")


def grande_america(out):
    nx, ny = 64, 42
    lon0, lat0 = -10.0, 44.0
    width_km, height_km = 664.3, 443.0
    m_per_deg_lat = 6371000.0 * math.pi / 180.0
    mean_lat = lat0 + 0.5 * height_km * 1e3 / m_per_deg_lat
    m_per_deg_lon = m_per_deg_lat * math.cos(math.radians(mean_lat))
    dlon = width_km * 1e3 / nx / m_per_deg_lon
    dlat = height_km * 1e3 / ny / m_per_deg_lat

    def coast_lon(lat):
        # stylised Biscay coastline: runs north-south, with a peninsula near 48N
        base = -1.6 - 0.9 * max(0.0, lat - 46.5)
        if lat > 47.6:
            base = -4.6
        return base

    rows = []
    for j in range(ny):
        lat = lat0 + (j + 0.5) * dlat
        row = []
        for i in range(nx):
            lon = lon0 + (i + 0.5) * dlon
            dist = (coast_lon(lat) - lon) * m_per_deg_lon / 1e3  # km offshore
            if dist <= 0.0 or lat < 44.05:
                row.append(0)
                continue
            shelf = 20.0 + 180.0 * min(dist / 120.0, 1.0)
            slope = 4600.0 * min(max((dist - 120.0) / 150.0, 0.0), 1.0)
            row.append(round(max(shelf, slope), 1))
        rows.append(row)
    write_raster(os.path.join(out, "grande_america_bathymetry.asc"), rows, lon0, lat0, round(dlon, 9), round(dlat, 9))

    start = datetime(2019, 3, 11, 22, 0, tzinfo=timezone.utc)
    hours = 12 * 24 + 6
    lons = [lon0 + k * 2.2 for k in range(5)]
    lats = [lat0 + k * 1.35 for k in range(4)]

    def wind(t, lon, lat):
        h = (t - start).total_seconds() / 3600.0
        speed = 6.0 + 2.5 * math.sin(2 * math.pi * h / 36.0) + 0.15 * (lat - lat0)
        # blowing toward the east-south-east, swinging between north-east and south
        bearing = math.radians(110.0 + 45.0 * math.sin(2 * math.pi * h / 200.0) + 2.0 * (lon - lon0))
        return speed * math.sin(bearing), speed * math.cos(bearing)

    def current(t, lon, lat):
        h = (t - start).total_seconds() / 3600.0
        tide = 0.25 * math.sin(2 * math.pi * h / 12.42)
        return 0.05 + tide * 0.8, 0.03 + tide * 0.6

    write_series(os.path.join(out, "grande_america_wind.csv"), "wind",
                 [start + timedelta(hours=3 * k) for k in range(hours // 3 + 1)], lons, lats, wind)
    write_series(os.path.join(out, "grande_america_current.csv"), "current",
                 [start + timedelta(hours=k) for k in range(hours + 1)], [lon0, lon0 + 9.0], [lat0, lat0 + 4.0],
                 current)


def reference(out):
    nx, ny = 20, 14
    rows = []
    for j in range(ny):
        row = []
        for i in range(nx):
            if i >= nx - 2 or (8 <= i <= 9 and 5 <= j <= 6):
                row.append(0)  # coast on the east side and a small island
            else:
                row.append(round(25.0 + 4.0 * (nx - i) + 1.5 * j, 1))
        rows.append(row)
    write_raster(os.path.join(out, "reference_bathymetry.asc"), rows, 0, 0, 1, 1)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default=os.path.join(os.path.dirname(os.path.abspath(__file__)), "..", "scenarios"))
    args = ap.parse_args()
    os.makedirs(args.out, exist_ok=True)
    grande_america(args.out)
    reference(args.out)


if __name__ == "__main__":
    main()
