#include "binaq/image_io.hpp"

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

namespace binaq {

namespace {

bool supported_extension(const std::filesystem::path& path) {
    std::string ext = path.extension().string();
    for (auto& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return ext == ".png" || ext == ".bmp" || ext == ".tif" || ext == ".tiff";
}

} // namespace

std::uint8_t luminance(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    // Integer BT.601 with round-to-nearest; exact for gray pixels (v,v,v).
    const int weighted = 299 * r + 587 * g + 114 * b;
    return static_cast<std::uint8_t>((weighted + 500) / 1000);
}

RasterImage load_image(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) {
        throw IoError("cannot read image: " + path.string() + " (no such file)");
    }
    if (!supported_extension(path)) {
        throw FormatError("unsupported image format: " + path.string() +
                          " (expected PNG, BMP or TIFF)");
    }
    cv::Mat mat = cv::imread(path.string(), cv::IMREAD_UNCHANGED);
    if (mat.empty()) {
        throw IoError("cannot read image: " + path.string());
    }
    if (mat.depth() != CV_8U) {
        throw FormatError("unsupported bit depth in " + path.string() +
                          " (expected 8-bit grayscale or 24-bit RGB)");
    }

    RasterImage out(mat.cols, mat.rows);
    if (mat.channels() == 1) {
        for (int y = 0; y < mat.rows; ++y) {
            const std::uint8_t* row = mat.ptr<std::uint8_t>(y);
            for (int x = 0; x < mat.cols; ++x) {
                out.set(x, y, row[x]);
            }
        }
    } else if (mat.channels() == 3) {
        // OpenCV decodes interleaved BGR.
        for (int y = 0; y < mat.rows; ++y) {
            const cv::Vec3b* row = mat.ptr<cv::Vec3b>(y);
            for (int x = 0; x < mat.cols; ++x) {
                out.set(x, y, luminance(row[x][2], row[x][1], row[x][0]));
            }
        }
    } else {
        throw FormatError("unsupported channel count (" + std::to_string(mat.channels()) +
                          ") in " + path.string());
    }
    return out;
}

void save_binary(const BinaryImage& image, const std::filesystem::path& path) {
    cv::Mat mat(image.height(), image.width(), CV_8UC1);
    for (int y = 0; y < image.height(); ++y) {
        std::uint8_t* row = mat.ptr<std::uint8_t>(y);
        for (int x = 0; x < image.width(); ++x) {
            row[x] = image.foreground(x, y) ? 0 : 255;
        }
    }
    bool ok = false;
    try {
        ok = cv::imwrite(path.string(), mat);
    } catch (const cv::Exception& e) {
        throw IoError("cannot write " + path.string() + ": " + e.what());
    }
    if (!ok) {
        throw IoError("cannot write " + path.string());
    }
}

void save_raster(const RasterImage& image, const std::filesystem::path& path) {
    cv::Mat mat(image.height(), image.width(), CV_8UC1);
    for (int y = 0; y < image.height(); ++y) {
        std::uint8_t* row = mat.ptr<std::uint8_t>(y);
        for (int x = 0; x < image.width(); ++x) {
            row[x] = image.at(x, y);
        }
    }
    bool ok = false;
    try {
        ok = cv::imwrite(path.string(), mat);
    } catch (const cv::Exception& e) {
        throw IoError("cannot write " + path.string() + ": " + e.what());
    }
    if (!ok) {
        throw IoError("cannot write " + path.string());
    }
}

void save_rgb(const RgbImage& image, const std::filesystem::path& path) {
    cv::Mat mat(image.height(), image.width(), CV_8UC3);
    for (int y = 0; y < image.height(); ++y) {
        cv::Vec3b* row = mat.ptr<cv::Vec3b>(y);
        for (int x = 0; x < image.width(); ++x) {
            row[x] = cv::Vec3b(image.channel(x, y, 2), image.channel(x, y, 1),
                               image.channel(x, y, 0)); // BGR on disk
        }
    }
    bool ok = false;
    try {
        ok = cv::imwrite(path.string(), mat);
    } catch (const cv::Exception& e) {
        throw IoError("cannot write " + path.string() + ": " + e.what());
    }
    if (!ok) {
        throw IoError("cannot write " + path.string());
    }
}

} // namespace binaq
