"""Source template for the bundled face-recognition pipeline.

CAMERA -> PREPROC -> FILTER -> FEATURE -> MATCH -> CLASSIFY -> DISPLAY, with
DATABASE streaming 20 reference entries into MATCH and two kernels,
DISTANCE (squared Euclidean distance) and ROOT (integer square root),
invoked from MATCH.  Each frame is four pixels reduced to a two-component
feature vector.
"""

ENTRIES = 20
PIXELS = 4

TEMPLATE = """\
# Synthetic face-recognition pipeline: {frames} frames, {entries}-entry database.
system face_recognition

context config1 bitstream 100 {{
  fn DISTANCE latency 50
}}
context config2 bitstream 80 {{
  fn ROOT latency 20
}}

module CAMERA {{
  port in sensor
  port out pix
  behavior {{
    repeat {frames} {{
      repeat {pixels} {{
        read sensor -> p
        compute grab 2
        write pix <- p
      }}
    }}
  }}
}}

module PREPROC {{
  port in pix
  port out norm
  behavior {{
    repeat {frames} {{
      repeat {pixels} {{
        read pix -> p
        if p < 0 {{
          q = 0
        }} else {{
          if p > 255 {{
            q = 255
          }} else {{
            q = p
          }}
        }}
        compute clamp 3
        write norm <- q
      }}
    }}
  }}
}}

module FILTER {{
  port in norm
  port out filt
  behavior {{
    repeat {frames} {{
      repeat {half} {{
        read norm -> a
        read norm -> b
        compute smooth 4
        write filt <- (a + b) / 2
      }}
    }}
  }}
}}

module FEATURE {{
  port in filt
  port out feat
  behavior {{
    repeat {frames} {{
      read filt -> x
      read filt -> y
      compute extract 6
      write feat <- x
      write feat <- y - x
    }}
  }}
}}

module DATABASE {{
  port out entry
  behavior {{
    repeat {frames} {{
      k = 0
      repeat {entries} {{
        v = k * 53 + 17
        w = k * 29 + 101
        compute fetch 5
        write entry <- v - v / 256 * 256
        write entry <- w - w / 512 * 512 - 256
        k = k + 1
      }}
    }}
  }}
}}

module MATCH {{
  port in feat
  port in entry
  port in dq_in
  port out dq_out
  port out score
  behavior {{
    repeat {frames} {{
      read feat -> f0
      read feat -> f1
      reconfigure config1
      repeat {entries} {{
        read entry -> e0
        read entry -> e1
        callfpga DISTANCE(f0, f1, e0, e1) -> d
        compute collect 3
        write dq_out <- d
      }}
      reconfigure config2
      repeat {entries} {{
        read dq_in -> d2
        callfpga ROOT(d2) -> r
        compute rank 2
        write score <- r
      }}
    }}
  }}
}}

module DISTANCE {{
  kernel (a0, a1, b0, b1) -> dist {{
    t0 = a0 - b0
    t1 = a1 - b1
    dist = t0 * t0 + t1 * t1
  }}
}}

module ROOT {{
  kernel (x) -> root {{
    lo = 0
    hi = 46341
    repeat 16 {{
      mid = (lo + hi) / 2
      if mid * mid <= x {{
        lo = mid
      }} else {{
        hi = mid
      }}
    }}
    root = lo
  }}
}}

module CLASSIFY {{
  port in score
  port out cls
  port out conf
  behavior {{
    repeat {frames} {{
      best = 2147483647
      bi = 0
      idx = 0
      repeat {entries} {{
        read score -> s
        if s < best {{
          best = s
          bi = idx
        }}
        idx = idx + 1
      }}
      compute decide 4
      write cls <- bi
      write conf <- best
    }}
  }}
}}

module DISPLAY {{
  port in cls
  port in conf
  port out label
  port out distance
  behavior {{
    repeat {frames} {{
      read cls -> c
      read conf -> b
      compute show 2
      write label <- c
      write distance <- b
    }}
  }}
}}

channel in_frame CAMERA.pix -> PREPROC.pix capacity 4
channel norm PREPROC.norm -> FILTER.norm
channel filt FILTER.filt -> FEATURE.filt
channel feat FEATURE.feat -> MATCH.feat capacity 2
channel entry DATABASE.entry -> MATCH.entry capacity 2
channel dq MATCH.dq_out -> MATCH.dq_in capacity {entries} selfloop
channel score MATCH.score -> CLASSIFY.score
channel out_class CLASSIFY.cls -> DISPLAY.cls
channel out_conf CLASSIFY.conf -> DISPLAY.conf
"""

SW_MODULES = ("CAMERA", "PREPROC", "FILTER", "FEATURE", "DATABASE", "MATCH", "CLASSIFY", "DISPLAY")
KERNELS = (("DISTANCE", "config1"), ("ROOT", "config2"))


def face_source(frames: int = 10) -> str:
    return TEMPLATE.format(frames=frames, pixels=PIXELS, half=PIXELS // 2, entries=ENTRIES)


def face_pixels(frames: int = 10) -> list[int]:
    """Deterministic sensor values, including out-of-range ones the clamp sees."""
    return [((f * 7 + i * 61) * 37) % 331 - 30 for f in range(frames) for i in range(PIXELS)]
