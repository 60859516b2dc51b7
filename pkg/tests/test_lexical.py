from collections import Counter

import pytest
from hypothesis import given
from hypothesis import strategies as st

from urlsift.lexical import LEXICAL_SCHEMA, LexicalConfig, extract_lexical, lexical_features, lexical_schema
from urlsift.parsing import SuffixList, parse_url, split_host

CFG = LexicalConfig(suspicious_tlds={"tk", "xyz"}, top_domains={"google", "paypal"})
IDX = {name: i for i, (name, _) in enumerate(LEXICAL_SCHEMA)}


def feats(raw, cfg=CFG):
    return dict(zip((n for n, _ in LEXICAL_SCHEMA), lexical_features(raw, cfg)))


def test_schema():
    schema = lexical_schema()
    assert len(schema) == 23
    assert schema[0] == (0, "url_length", "length")
    assert schema[3] == (3, "tld_suspicious", "boolean")
    assert len({name for _, name, _ in schema}) == 23


def test_simple_url():
    f = feats("http://a.b.com/x/")
    assert f["url_length"] == 17
    assert f["path_slash_count"] == 2
    assert f["path_subdir_count"] == 1
    assert f["sub_count"] == 1
    assert f["query_count"] == 0
    assert f["pd_length"] == 1
    assert f["path_has_single_char_dir"] == 1.0


def test_empty_components():
    values = lexical_features("http://example.com", CFG)
    assert values[13:] == [0.0] * 10


def test_query_and_special_count():
    raw = "http://ex.com/?a=1&b=2"
    tally = Counter(raw)
    expected = sum(tally[c] for c in ";_?=&")
    assert expected == 4
    f = feats(raw)
    assert f["url_special_count"] == expected
    assert f["query_count"] == 2


def test_host_features():
    f = feats("http://user@login.secure.paypal.tk/")
    assert f["tld_suspicious"] == 1.0
    assert f["pd_in_top_domains"] == 1.0
    assert f["pd_at_count"] == 1
    assert f["sub_dot_count"] == 1
    assert f["sub_count"] == 2
    f = feats("http://10.0.0.1/a")
    assert f["pd_contains_ip"] == 1.0
    assert f["pd_length"] == 0
    f = feats("http://my-ba9nk_1.com/")
    assert f["pd_digit_count"] == 2
    assert f["pd_hyphen_count"] == 1
    assert f["pd_non_alnum_count"] == 2


def test_path_features():
    f = feats("http://h.com/ADMIN/a/My%20Docs/0x00/file.PHP")
    assert f["path_subdir_count"] == 4
    assert f["path_has_upper_dir"] == 1.0
    assert f["path_has_single_char_dir"] == 1.0
    assert f["path_has_pct20"] == 1.0
    assert f["path_zero_count"] == 4
    path = "/ADMIN/a/My%20Docs/0x00/file.PHP"
    assert f["path_special_count"] == sum(1 for c in path if not (c.isascii() and c.isalnum()) and c != "/")
    upper = sum(1 for c in path if "A" <= c <= "Z")
    lower = sum(1 for c in path if "a" <= c <= "z")
    assert f["path_upper_lower_ratio"] == upper / lower
    # A trailing file name is not a directory.
    assert feats("http://h.com/X")["path_has_upper_dir"] == 0.0
    assert feats("http://h.com/X/")["path_has_upper_dir"] == 1.0


def test_digit_letter_ratio_and_params():
    f = feats("http://h.com/a;sess=12")
    assert f["params_length"] == len("sess=12")
    raw = "http://h.com/a;sess=12"
    digits = sum(c.isdigit() for c in raw)
    letters = sum(c.isalpha() for c in raw)
    assert f["digit_letter_ratio"] == digits / letters
    assert feats("123")["digit_letter_ratio"] == 3.0


def test_config_files(tmp_path):
    (tmp_path / "t.txt").write_text("TK\n", encoding="utf-8")
    (tmp_path / "d.txt").write_text("# x\nExample\n", encoding="utf-8")
    cfg = LexicalConfig.from_files(tmp_path / "t.txt", tmp_path / "d.txt")
    assert cfg.suspicious_tlds == {"tk"} and cfg.top_domains == {"example"}
    default = LexicalConfig.default()
    assert "tk" in default.suspicious_tlds and "google" in default.top_domains


urls = st.builds(
    lambda sub, pd, path, q: f"http://{sub}{pd}.com{path}" + (f"?{q}" if q else ""),
    st.sampled_from(["", "www.", "a.b.", "x.y.z."]),
    st.text(alphabet="abcdef0123-", min_size=1, max_size=10).filter(lambda s: not s.startswith("-")),
    st.text(alphabet="/abcABC0_%2.-", max_size=30).map(lambda s: "/" + s),
    st.text(alphabet="a=1&", max_size=10),
)


@given(urls, st.sampled_from("abc=&"))
def test_query_append_changes_only_length(url, ch):
    base = lexical_features(url, CFG)
    sep = "&" if "?" in url else "?"
    longer = lexical_features(url + sep + "k", CFG)
    more = lexical_features(url + sep + "k" + ch, CFG)
    assert more[0] == longer[0] + 1
    assert more[3:13] == longer[3:13] == base[3:13]


@given(urls)
def test_lowercasing_path(url):
    parts = parse_url(url)
    lowered = parse_url(url.replace(parts.path, parts.path.lower(), 1) if parts.path else url)
    a = extract_lexical(lowered, split_host(lowered.host), CFG)
    b = extract_lexical(parts, split_host(parts.host), CFG)
    assert a[IDX["path_upper_lower_ratio"]] == 0.0
    assert a[IDX["path_has_upper_dir"]] == 0.0
    for name in ("path_slash_count", "path_zero_count", "path_special_count", "path_subdir_count"):
        assert a[IDX[name]] == b[IDX[name]]


@given(urls)
def test_subdomain_counts_and_nonnegative(url):
    f = feats(url)
    if f["sub_count"]:
        assert f["sub_count"] == f["sub_dot_count"] + 1
    else:
        assert f["sub_dot_count"] == 0
    values = list(f.values())
    assert len(values) == 23
    assert all(v >= 0 and v == v and v != float("inf") for v in values)
    for (name, kind), v in zip(LEXICAL_SCHEMA, values):
        if kind == "boolean":
            assert v in (0.0, 1.0)
        elif kind in ("count", "length"):
            assert v == int(v)


def test_deterministic_and_suffix_injection():
    sl = SuffixList(["com"])
    a = lexical_features("http://a.b.c.co.uk/", CFG, sl)
    b = lexical_features("http://a.b.c.co.uk/", CFG)
    assert a[IDX["sub_count"]] == 4  # no co.uk rule: suffix empty, pd "uk"
    assert b[IDX["sub_count"]] == 2
    assert lexical_features("http://x.com/", CFG) == lexical_features("http://x.com/", CFG)


@pytest.mark.parametrize("raw", ["http://", "?", "#", ";", "@", "http://@:/;?#"])
def test_degenerate_inputs_are_total(raw):
    assert len(lexical_features(raw, CFG)) == 23
