// SPDX-License-Identifier: Apache-2.0
#include <csetjmp>
#include <cstdio>

#include <jpeglib.h>

#include "skybridge/jpeg.hpp"

namespace skybridge {

namespace {

// libjpeg reports fatal errors through error_exit, which by default kills
// the process. Redirect it into a longjmp so malformed input becomes a
// typed error.
struct ErrorTrap {
  jpeg_error_mgr mgr;
  jmp_buf jump;
  char message[JMSG_LENGTH_MAX];
};

void on_error_exit(j_common_ptr cinfo) {
  auto* trap = reinterpret_cast<ErrorTrap*>(cinfo->err);
  (*cinfo->err->format_message)(cinfo, trap->message);
  longjmp(trap->jump, 1);
}

void on_emit_message(j_common_ptr, int) {
  // Corrupt-data warnings are expected under fuzzing; stay quiet.
}

constexpr JDIMENSION kMaxDimension = 1 << 15;

}  // namespace

std::variant<GrayFrame, JpegDecodeError> decode_jpeg_gray(std::span<const uint8_t> data) {
  if (data.size() < 4) {
    return JpegDecodeError{"input shorter than a JPEG header"};
  }

  jpeg_decompress_struct cinfo{};
  ErrorTrap trap{};
  cinfo.err = jpeg_std_error(&trap.mgr);
  trap.mgr.error_exit = on_error_exit;
  trap.mgr.emit_message = on_emit_message;

  GrayFrame frame;
  if (setjmp(trap.jump)) {
    jpeg_destroy_decompress(&cinfo);
    return JpegDecodeError{trap.message};
  }

  jpeg_create_decompress(&cinfo);
  jpeg_mem_src(&cinfo, data.data(), data.size());
  if (jpeg_read_header(&cinfo, TRUE) != JPEG_HEADER_OK) {
    jpeg_destroy_decompress(&cinfo);
    return JpegDecodeError{"not a JPEG header"};
  }
  if (cinfo.image_width == 0 || cinfo.image_height == 0 ||
      cinfo.image_width > kMaxDimension || cinfo.image_height > kMaxDimension) {
    jpeg_destroy_decompress(&cinfo);
    return JpegDecodeError{"unreasonable image dimensions"};
  }

  // For YCbCr JPEGs this yields the luminance component.
  cinfo.out_color_space = JCS_GRAYSCALE;
  jpeg_start_decompress(&cinfo);

  frame.width = static_cast<int>(cinfo.output_width);
  frame.height = static_cast<int>(cinfo.output_height);
  frame.pixels.resize(static_cast<size_t>(frame.width) * frame.height);

  while (cinfo.output_scanline < cinfo.output_height) {
    JSAMPROW row = frame.pixels.data() +
                   static_cast<size_t>(cinfo.output_scanline) * frame.width;
    jpeg_read_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_decompress(&cinfo);
  jpeg_destroy_decompress(&cinfo);
  return frame;
}

}  // namespace skybridge
