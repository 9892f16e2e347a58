"""Grid validity and the sparse codec."""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gridexit.grid import (CodecError, decode_sparse, encode_sparse,
                           grids_equal, is_valid_grid, raw_text)

from conftest import random_grid, random_sparse_grid


class TestIsValidGrid:
    def test_accepts_rectangular(self):
        assert is_valid_grid(((1, 2), (3, 4)))
        assert is_valid_grid([[1, 2], [3, 4]])

    def test_rejects_ragged(self):
        assert not is_valid_grid([[1, 2], [3]])

    def test_rejects_oversize(self):
        assert not is_valid_grid(tuple(((0,),) * 31))
        assert not is_valid_grid((tuple(range(10)) + tuple([0] * 21),))

    def test_rejects_bad_cells(self):
        assert not is_valid_grid(((1, 10),))
        assert not is_valid_grid(((1, -1),))
        assert not is_valid_grid(((1, True),))
        assert not is_valid_grid(((1, "2"),))

    def test_rejects_non_matrix(self):
        assert not is_valid_grid(5)
        assert not is_valid_grid(())
        assert not is_valid_grid((1, 2))
        assert not is_valid_grid(frozenset({(1, (0, 0))}))


class TestCodec:
    def test_single_foreground_cell(self):
        assert encode_sparse(((0, 0), (0, 5))) == "2x2 bg=0 5:[1,1]"

    def test_all_background(self):
        assert encode_sparse(((7,),)) == "1x1 bg=7"

    def test_decode_examples(self):
        assert decode_sparse("2x2 bg=0 5:[1,1]") == ((0, 0), (0, 5))
        assert decode_sparse("1x1 bg=3") == ((3,),)

    def test_decode_row_out_of_bounds(self):
        with pytest.raises(CodecError, match="row 2 out of bounds"):
            decode_sparse("2x2 bg=0 5:[2,0]")

    def test_decode_col_out_of_bounds(self):
        with pytest.raises(CodecError, match="col 3 out of bounds"):
            decode_sparse("2x2 bg=0 5:[0,3]")

    def test_decode_duplicate_cell(self):
        with pytest.raises(CodecError, match="assigned twice"):
            decode_sparse("2x2 bg=0 5:[1,1] 3:[1,1]")

    @pytest.mark.parametrize("text", [
        "", "2x2", "axb bg=0", "2x2 bg=x", "2x2 bg=0 5[0,0]",
        "2x2 bg=0 5:", "2x2 bg=0 5:[0 0]", "2x2  bg=0", "0x2 bg=0",
        "31x2 bg=0", "2x2 bg=11", "2x2 bg=0 12:[0,0]",
    ])
    def test_decode_malformed(self, text):
        with pytest.raises(CodecError):
            decode_sparse(text)

    def test_error_positions_point_into_text(self):
        text = "2x2 bg=0 5:[9,9]"
        with pytest.raises(CodecError) as err:
            decode_sparse(text)
        assert 0 <= err.value.pos < len(text)

    def test_background_is_mode_lowest_on_ties(self):
        # 1 and 2 both appear twice; lowest wins
        assert encode_sparse(((1, 2), (2, 1))).startswith("2x2 bg=1")

    def test_body_never_lists_background(self):
        rng = random.Random(7)
        for _ in range(200):
            g = random_sparse_grid(rng, max_side=12)
            text = encode_sparse(g)
            bg = text.split(" ")[1].removeprefix("bg=")
            for group in text.split(" ")[2:]:
                assert group.split(":")[0] != bg

    def test_encode_deterministic(self):
        g = ((1, 2, 2), (0, 2, 1))
        assert encode_sparse(g) == encode_sparse(tuple(map(tuple, g)))

    def test_encode_rejects_invalid(self):
        with pytest.raises(ValueError):
            encode_sparse(((10,),))

    @settings(max_examples=300, deadline=None)
    @given(st.integers(1, 30), st.integers(1, 30), st.randoms(use_true_random=False))
    def test_roundtrip_property(self, h, w, rnd):
        g = tuple(tuple(rnd.randrange(10) for _ in range(w)) for _ in range(h))
        assert decode_sparse(encode_sparse(g)) == g

    def test_roundtrip_dense_random(self):
        rng = random.Random(13)
        for _ in range(500):
            g = random_grid(rng)
            assert decode_sparse(encode_sparse(g)) == g


class TestGridsEqual:
    def test_equal(self):
        assert grids_equal(((1,),), ((1,),))

    def test_dim_mismatch(self):
        assert not grids_equal(((1,),), ((1, 1),))

    def test_cell_mismatch(self):
        assert not grids_equal(((1, 2),), ((2, 1),))


def test_raw_text_compact():
    assert raw_text(((1, 2), (3, 4))) == "[[1,2],[3,4]]"
