"""Encoder and decoder, checked on their input and one weight each."""

from checks._decorators import COMPOSITE_ENTRIES, COMPOSITE_EPS, gradcheck
from checks.runner import Contraction, GradCase
from model.codec import Decoder, DecoderSpec, Encoder, EncoderSpec, decode_frames, encode_frames


@gradcheck(domain="codec", tags=["encoder"], eps=COMPOSITE_EPS, tolerance=1e-4, entries=COMPOSITE_ENTRIES)
def encoder(rng):
    enc = Encoder(EncoderSpec(base_channels=2, in_channels=3), rng)
    inputs = {"x_masked": rng.uniform((2, 8, 8, 3)), "weight": enc.layers[1].weight.data.copy()}
    c = Contraction(rng)

    def loss(x, w):
        enc.layers[1].weight = w
        return c(encode_frames(x, enc))

    return GradCase(loss, inputs)


@gradcheck(domain="codec", tags=["decoder"], eps=COMPOSITE_EPS, tolerance=1e-4, entries=COMPOSITE_ENTRIES)
def decoder(rng):
    dec = Decoder(DecoderSpec(base_channels=2, out_channels=3), rng)
    inputs = {"features": rng.normal((2, 8, 2, 2)), "weight": dec.up2.weight.data.copy()}
    c = Contraction(rng)

    def loss(f, w):
        dec.up2.weight = w
        return c(decode_frames(f, dec))

    return GradCase(loss, inputs)
