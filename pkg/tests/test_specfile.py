import pytest

from hsim import (
    SpecFileError,
    build_system,
    bundled_spec_names,
    bundled_spec_path,
    export_spec,
    load_spec,
    parse_spec,
    resolve_spec_path,
    save_spec,
)

GOOD = """
# two mode example
[photon_modes]
label=c frequency_ghz=10.65 linewidth_mhz=1.0 readout_weight=1.0

[magnon_modes]
label=m field_offset_mt=0.0 linewidth_mhz=2.0 diameter_mm=2.1

[couplings]
a=c b=m g_mhz=90.0

[constants]
gyromagnetic_ghz_per_t=28.0
"""


def test_parse_round_trip_identity():
    spec = parse_spec(GOOD)
    assert parse_spec(export_spec(spec)) == spec


def test_parse_values():
    spec = parse_spec(GOOD)
    assert spec.photon_modes[0].label == "c"
    assert spec.photon_modes[0].frequency_ghz == 10.65
    assert spec.magnon_modes[0].diameter_mm == 2.1
    assert spec.magnon_modes[0].gyromagnetic_override_ghz_per_t is None
    assert spec.couplings[0].g_mhz == 90.0
    assert spec.gyromagnetic_ghz_per_t == 28.0


def test_default_gyromagnetic_when_constants_absent():
    text = GOOD.split("[constants]")[0]
    assert parse_spec(text).gyromagnetic_ghz_per_t == 28.0


def test_comments_and_blank_lines_ignored():
    text = GOOD.replace("a=c b=m g_mhz=90.0", "a=c b=m g_mhz=90.0   # strong\n\n")
    assert parse_spec(text).couplings[0].g_mhz == 90.0


@pytest.mark.parametrize(
    "mutation, fragment",
    [
        (("[couplings]", "[coupling]"), "unknown section"),
        (("g_mhz=90.0", "g_mhz=ninety"), "not a number"),
        (("label=c ", "label=c label=c "), "repeated"),
        (("a=c b=m g_mhz=90.0", "c m 90.0"), "key=value"),
        (("frequency_ghz", "freq_ghz"), "unknown key"),
        (("label=m ", ""), "missing key"),
    ],
)
def test_malformed_documents_rejected(mutation, fragment):
    old, new = mutation
    with pytest.raises(SpecFileError, match=fragment):
        parse_spec(GOOD.replace(old, new))


def test_error_carries_line_number():
    with pytest.raises(SpecFileError, match=r"line 4"):
        parse_spec("\n\n[photon_modes]\nlabel=c frequency_ghz=x linewidth_mhz=1 readout_weight=1")


def test_record_before_section_rejected():
    with pytest.raises(SpecFileError, match="before any section"):
        parse_spec("label=c frequency_ghz=1 linewidth_mhz=1 readout_weight=1")


def test_fit_report_sections_are_skipped():
    text = GOOD + "\n[fit_diagnostics]\nobjective=1e-9 iterations=12\n"
    text += "[parameter_changes]\ncouplings.c-m initial=80 fitted=90 change=10\n"
    assert parse_spec(text) == parse_spec(GOOD)


def test_save_and_load(tmp_path):
    spec = parse_spec(GOOD)
    path = tmp_path / "sys.spec"
    save_spec(spec, path)
    assert load_spec(path) == spec


def test_bundled_names_cover_shipped_scenarios():
    names = bundled_spec_names()
    for expected in (
        "fig1a",
        "fig1b",
        "fig1c",
        "fig1d",
        "ten_spheres_roomT",
        "ten_spheres_90mK",
        "single_sphere_14GHz",
    ):
        assert expected in names


@pytest.mark.parametrize("name", ["fig1a", "fig1b", "fig1c", "fig1d",
                                  "ten_spheres_roomT", "ten_spheres_90mK",
                                  "single_sphere_14GHz"])
def test_every_bundled_spec_builds(name):
    build_system(load_spec(bundled_spec_path(name)))


def test_bundled_lookup_accepts_suffix():
    assert bundled_spec_path("fig1a") == bundled_spec_path("fig1a.spec")


def test_unknown_bundled_name():
    with pytest.raises(SpecFileError):
        bundled_spec_path("fig9z")


def test_resolve_prefers_real_files(tmp_path):
    path = tmp_path / "fig1a"
    save_spec(parse_spec(GOOD), path)
    assert resolve_spec_path(str(path)) == path
    with pytest.raises(SpecFileError, match="not found"):
        resolve_spec_path(str(tmp_path / "missing.spec"))


def test_export_floats_round_trip_exactly():
    spec = parse_spec(GOOD.replace("g_mhz=90.0", "g_mhz=90.00000000001"))
    again = parse_spec(export_spec(spec))
    assert again.couplings[0].g_mhz == spec.couplings[0].g_mhz
